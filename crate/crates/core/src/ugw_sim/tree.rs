//! Galton-Watson trees as per-generation child-count lists.
//!
//! Generations `0..=explicit` are stored vertex by vertex in breadth-first
//! order, so the children of vertex `i` of generation `d` are a contiguous
//! range of generation `d+1`. Below `explicit`, only the generation sizes of
//! each bottom vertex's subtree are kept (its "tail"), which is all that
//! subtree counts need.

use std::ops::Range;

use rand::Rng;

use super::{RootLaw, Stepper};
use crate::degree_model::{DegreeDistribution, LawSampler};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone)]
pub struct GwTree {
    /// `first[d]` has one entry per vertex of generation `d` plus one: the
    /// index of its first child in generation `d+1`.
    first: Vec<Vec<usize>>,
    /// Row `i` holds, for vertex `i` of generation `explicit`, the sizes of
    /// its subtree's generations `1..=depth−explicit`.
    tails: Vec<u64>,
    explicit: usize,
    depth: usize,
}

impl GwTree {
    /// Grows a tree with `explicit` stored generations and tails down to
    /// generation `depth`.
    pub fn grow(
        dist: &DegreeDistribution,
        root: RootLaw,
        explicit: usize,
        depth: usize,
        seed: u64,
    ) -> Result<Self> {
        root.validate(dist)?;
        let stepper = Stepper::new(dist.offspring_distribution());
        let root_sampler = dist.law().sampler();
        Self::grow_with(&stepper, &root_sampler, root, explicit, depth, &mut seed::rng(seed))
    }

    pub(crate) fn grow_with<R: Rng + ?Sized>(
        stepper: &Stepper,
        root_sampler: &LawSampler,
        root: RootLaw,
        explicit: usize,
        depth: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if explicit < 1 || explicit > depth {
            return Err(Error::Precondition(format!(
                "need 1 ≤ explicit ≤ depth, got explicit {explicit}, depth {depth}"
            )));
        }
        let root_children = match root {
            RootLaw::P => root_sampler.sample(rng),
            RootLaw::SizeBiased => stepper.draw(rng),
            RootLaw::Fixed(k) => k,
        };
        let mut first = vec![vec![0, root_children]];
        for d in 1..explicit {
            let len = *first[d - 1].last().unwrap();
            let mut offsets = Vec::with_capacity(len + 1);
            let mut acc = 0;
            offsets.push(0);
            for _ in 0..len {
                acc += stepper.draw(rng);
                offsets.push(acc);
            }
            first.push(offsets);
        }
        let bottom = *first[explicit - 1].last().unwrap();
        let stride = depth - explicit;
        let mut tails = Vec::with_capacity(bottom * stride);
        for _ in 0..bottom {
            let mut z = 1;
            for _ in 0..stride {
                z = stepper.step(z, rng);
                tails.push(z);
            }
        }
        Ok(Self {
            first,
            tails,
            explicit,
            depth,
        })
    }

    pub fn explicit_depth(&self) -> usize {
        self.explicit
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of stored vertices in generation `d ≤ explicit`.
    pub fn generation_len(&self, d: usize) -> usize {
        if d == 0 {
            1
        } else {
            *self.first[d - 1].last().unwrap()
        }
    }

    /// Children of vertex `i` of generation `d < explicit`, as indices into
    /// generation `d+1`.
    pub fn child_range(&self, d: usize, i: usize) -> Range<usize> {
        self.first[d][i]..self.first[d][i + 1]
    }

    /// For each vertex of generation `d`, its number of descendants in
    /// generation `m` (`d ≤ explicit`, `d ≤ m ≤ depth`).
    pub fn descendants(&self, d: usize, m: usize) -> Vec<u64> {
        assert!(d <= self.explicit && d <= m && m <= self.depth);
        let (mut level, mut counts) = if m <= self.explicit {
            (m, vec![1; self.generation_len(m)])
        } else {
            let stride = self.depth - self.explicit;
            let col = m - self.explicit - 1;
            let counts = (0..self.generation_len(self.explicit))
                .map(|i| self.tails[i * stride + col])
                .collect();
            (self.explicit, counts)
        };
        while level > d {
            let offsets = &self.first[level - 1];
            counts = offsets
                .windows(2)
                .map(|w| counts[w[0]..w[1]].iter().sum())
                .collect();
            level -= 1;
        }
        counts
    }

    /// The same tree with only `explicit` generations stored and the rest
    /// folded into tails.
    pub fn collapsed(&self, explicit: usize) -> GwTree {
        assert!(explicit >= 1 && explicit <= self.explicit);
        let cols: Vec<Vec<u64>> = (explicit + 1..=self.depth)
            .map(|m| self.descendants(explicit, m))
            .collect();
        let tails = (0..self.generation_len(explicit))
            .flat_map(|i| cols.iter().map(move |c| c[i]))
            .collect();
        GwTree {
            first: self.first[..explicit].to_vec(),
            tails,
            explicit,
            depth: self.depth,
        }
    }

    /// Generation sizes `Z_0..=Z_depth`.
    pub fn z(&self) -> Vec<u64> {
        let mut z: Vec<u64> = (0..=self.explicit).map(|d| self.generation_len(d) as u64).collect();
        let stride = self.depth - self.explicit;
        for col in 0..stride {
            z.push(self.tails.iter().skip(col).step_by(stride).sum());
        }
        z
    }
}
