//! Free bases of `π₁` read off a labelled graph, folding words back into a
//! graph, and the growth-rate certificate.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{LabeledEdge, LabeledGraph};
use crate::error::{Error, Result};
use crate::nb_spectral::{growth_rate_estimate, power_iterate, NBOperator, PowerConfig};

/// A word in `x_1^{±1}, …, x_r^{±1}`: letter `+i` is `x_i`, `−i` is `x_i⁻¹`.
/// Written with `a, b, …` for the generators and capitals for inverses.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Word(pub Vec<i32>);

impl Word {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != -w[1])
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&l| -l).collect())
    }
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(letters: &[i32]) -> Word {
    let mut out: Vec<i32> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.0 {
            let base = if l > 0 { b'a' } else { b'A' };
            write!(f, "{}", (base + (l.unsigned_abs() - 1) as u8) as char)?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'a'..='z' => Ok(c as i32 - 'a' as i32 + 1),
                'A'..='Z' => Ok(-(c as i32 - 'A' as i32 + 1)),
                _ => Err(Error::Parse {
                    line: 0,
                    msg: format!("not a generator letter: {c:?}"),
                }),
            })
            .collect::<Result<_>>()
            .map(Word)
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Word> for String {
    fn from(w: Word) -> Self {
        w.to_string()
    }
}

/// A free basis of `π₁(A, basepoint)` as a subgroup of `F_r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupBasis {
    pub rank: usize,
    pub basepoint: usize,
    pub words: Vec<Word>,
}

/// Reads a basis off a connected labelled graph: a breadth-first spanning
/// tree from `basepoint` (neighbours taken in order of label, then outgoing
/// before incoming, then endpoint), and for each remaining edge `u → v`
/// labelled `x` the reduced word `path(u) · x · path(v)⁻¹`.
pub fn subgroup_basis(labeled: &LabeledGraph, basepoint: usize) -> Result<SubgroupBasis> {
    labeled.verify_immersion()?;
    let n = labeled.n();
    if basepoint >= n {
        return Err(Error::Precondition(format!("basepoint {basepoint} is not a vertex")));
    }
    // (label, incoming?, other endpoint, edge id, letter read when crossing)
    type Crossing = (usize, bool, usize, usize, i32);
    let mut around: Vec<Vec<Crossing>> = vec![Vec::new(); n];
    for (id, e) in labeled.edges().iter().enumerate() {
        let x = e.label as i32 + 1;
        around[e.tail].push((e.label, false, e.head, id, x));
        around[e.head].push((e.label, true, e.tail, id, -x));
    }
    for list in &mut around {
        list.sort_unstable();
    }
    let mut path: Vec<Option<Vec<i32>>> = vec![None; n];
    let mut tree_edge = vec![false; labeled.m()];
    path[basepoint] = Some(Vec::new());
    let mut queue = VecDeque::from([basepoint]);
    while let Some(v) = queue.pop_front() {
        for &(_, _, w, id, letter) in &around[v] {
            if path[w].is_none() {
                let mut p = path[v].clone().unwrap();
                p.push(letter);
                path[w] = Some(p);
                tree_edge[id] = true;
                queue.push_back(w);
            }
        }
    }
    if path.iter().any(Option::is_none) {
        return Err(Error::Graph("labelled graph is not connected".into()));
    }
    let words = labeled
        .edges()
        .iter()
        .enumerate()
        .filter(|&(id, _)| !tree_edge[id])
        .map(|(_, e)| {
            let to_tail = path[e.tail].as_ref().unwrap();
            let to_head = Word(path[e.head].clone().unwrap()).inverse();
            let mut letters = to_tail.clone();
            letters.push(e.label as i32 + 1);
            letters.extend(to_head.0);
            let w = free_reduce(&letters);
            if w.is_empty() {
                // only possible if two edges at a vertex share a label and direction
                return Err(Error::Immersion("a basis word reduced to the identity".into()));
            }
            Ok(w)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubgroupBasis {
        rank: words.len(),
        basepoint,
        words,
    })
}

/// The Stallings graph of the subgroup generated by `words`: a bouquet of
/// one cycle per word at vertex 0, folded until no two edges with the same
/// label leave or enter a vertex together. Returns the graph and the image
/// of the basepoint.
pub fn fold_words(words: &[Word], r: usize) -> Result<(LabeledGraph, usize)> {
    if let Some(w) = words.iter().find(|w| w.0.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > r)) {
        return Err(Error::Precondition(format!("word {w} uses a letter beyond x_{r}")));
    }
    let mut n = 1;
    let mut edges: Vec<LabeledEdge> = Vec::new();
    for w in words.iter().filter(|w| !w.is_empty()) {
        let mut cur = 0;
        for (i, &l) in w.0.iter().enumerate() {
            let next = if i + 1 == w.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            let label = l.unsigned_abs() as usize - 1;
            let (tail, head) = if l > 0 { (cur, next) } else { (next, cur) };
            edges.push(LabeledEdge { tail, head, label });
            cur = next;
        }
    }

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    loop {
        let mut changed = false;
        // (vertex, label, outgoing?) → the other endpoint seen first
        let mut seen: HashMap<(usize, usize, bool), usize> = HashMap::new();
        for e in &edges {
            let (t, h) = (find(&mut parent, e.tail), find(&mut parent, e.head));
            for (at, other, out) in [(t, h, true), (h, t, false)] {
                let prev = *seen.entry((at, e.label, out)).or_insert(other);
                let (a, b) = (find(&mut parent, prev), find(&mut parent, other));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut index = HashMap::new();
    let mut compact = |p: &mut [usize], v: usize| {
        let root = find(p, v);
        let next = index.len();
        *index.entry(root).or_insert(next)
    };
    let base = compact(&mut parent, 0);
    let mut folded: Vec<LabeledEdge> = edges
        .iter()
        .map(|e| LabeledEdge {
            tail: compact(&mut parent, e.tail),
            head: compact(&mut parent, e.head),
            label: e.label,
        })
        .collect();
    folded.sort_unstable();
    folded.dedup();
    let vertices = index.len();
    Ok((LabeledGraph::new(vertices, r, folded)?, base))
}

/// Growth rate of the universal cover read from walk counts, next to the
/// Perron eigenvalue from power iteration.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct GrowthCertificate {
    pub depth: usize,
    pub rate: f64,
    pub lambda1: f64,
    pub gap: f64,
}

impl GrowthCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.gap <= tol
    }
}

pub fn subgroup_growth_certificate(labeled: &LabeledGraph, depth: usize) -> Result<GrowthCertificate> {
    let g = labeled.underlying();
    if !g.is_connected() {
        return Err(Error::Graph("labelled graph is not connected".into()));
    }
    let op = NBOperator::new(&g)?;
    let rate = growth_rate_estimate(&op, depth);
    let cfg = PowerConfig {
        max_iter: 100_000,
        ..PowerConfig::default()
    };
    let lambda1 = power_iterate(&op, &cfg, 0)?.lambda1;
    Ok(GrowthCertificate {
        depth,
        rate,
        lambda1,
        gap: (rate - lambda1).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{named, MultiGraph};
    use crate::stallings::immerse;

    fn e(tail: usize, head: usize, label: usize) -> LabeledEdge {
        LabeledEdge { tail, head, label }
    }

    #[test]
    fn word_text() {
        let w: Word = "abAB".parse().unwrap();
        assert_eq!(w.0, vec![1, 2, -1, -2]);
        assert_eq!(w.to_string(), "abAB");
        assert_eq!(w.inverse().to_string(), "baBA");
        assert!("a1".parse::<Word>().is_err());
        assert_eq!(free_reduce(&[1, 2, -2, -1, 3]).0, vec![3]);
        assert_eq!(free_reduce(&[1, -1]).0, Vec::<i32>::new());
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"abAB\"");
    }

    #[test]
    fn bouquet_basis() {
        let g = LabeledGraph::new(1, 3, vec![e(0, 0, 0), e(0, 0, 1), e(0, 0, 2)]).unwrap();
        let b = subgroup_basis(&g, 0).unwrap();
        assert_eq!(b.rank, 3);
        let words: Vec<String> = b.words.iter().map(Word::to_string).collect();
        assert_eq!(words, ["a", "b", "c"]);
    }

    #[test]
    fn cycle_basis() {
        let g = LabeledGraph::new(5, 1, (0..5).map(|i| e(i, (i + 1) % 5, 0)).collect()).unwrap();
        let b = subgroup_basis(&g, 0).unwrap();
        assert_eq!(b.rank, 1);
        assert_eq!(b.words[0].to_string(), "aaaaa");
    }

    #[test]
    fn theta_basis() {
        // two vertices joined by three edges
        let g = LabeledGraph::new(2, 2, vec![e(0, 1, 0), e(1, 0, 0), e(0, 1, 1)]).unwrap();
        let b = subgroup_basis(&g, 0).unwrap();
        assert_eq!(b.rank, 2);
        assert!(b.words.iter().all(|w| w.is_reduced() && !w.is_empty()));
        let words: Vec<String> = b.words.iter().map(Word::to_string).collect();
        assert_eq!(words, ["aa", "bA"]);
    }

    #[test]
    fn disconnected_is_rejected() {
        let g = LabeledGraph::new(2, 1, vec![e(0, 0, 0)]).unwrap();
        assert!(matches!(subgroup_basis(&g, 0), Err(Error::Graph(_))));
    }

    #[test]
    fn folding_a_bouquet_of_cycles() {
        // <a², ab> folds to two vertices
        let words: Vec<Word> = ["aa", "ab"].iter().map(|s| s.parse().unwrap()).collect();
        let (g, base) = fold_words(&words, 2).unwrap();
        assert_eq!((g.n(), g.m(), base), (2, 3, 0));
        // <a, a> collapses to one loop
        let words: Vec<Word> = ["a", "a"].iter().map(|s| s.parse().unwrap()).collect();
        let (g, _) = fold_words(&words, 1).unwrap();
        assert_eq!((g.n(), g.m()), (1, 1));
        assert!(fold_words(&words, 0).is_err());
    }

    #[test]
    fn basis_folds_back_to_the_graph() {
        let g = named::petersen().into_multi();
        let labeled = immerse(&g, 2).unwrap();
        let basis = subgroup_basis(&labeled, 0).unwrap();
        assert_eq!(basis.rank, 15 - 10 + 1);
        let (folded, _) = fold_words(&basis.words, 2).unwrap();
        assert_eq!((folded.n(), folded.m()), (10, 15));
    }

    #[test]
    fn certificates_on_exact_cases() {
        let k5 = immerse(named::complete(5).as_multi(), 2).unwrap();
        let c = subgroup_growth_certificate(&k5, 18).unwrap();
        assert!((c.rate - 3.0).abs() < 1e-9 && (c.lambda1 - 3.0).abs() < 1e-9);
        let cyc = LabeledGraph::new(4, 1, (0..4).map(|i| e(i, (i + 1) % 4, 0)).collect()).unwrap();
        let c = subgroup_growth_certificate(&cyc, 18).unwrap();
        assert!(c.holds(1e-9), "{c:?}");
        let path = immerse(&MultiGraph::from_edges(2, &[(0, 1)]).unwrap(), 1).unwrap();
        assert!(subgroup_growth_certificate(&path, 18).is_err());
    }
}
