//! `emit-subgroup`: turn the best density-search graph into a free basis.

use std::fs;

use serde::Serialize;

use super::density::density_search;
use super::{Command, CommandOutput, ExperimentConfig, Outcome, SCHEMA_VERSION};
use crate::error::{Error, Result};
use crate::stallings::{immerse, subgroup_basis, subgroup_growth_certificate, GrowthCertificate, SubgroupBasis};

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct SubgroupReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub witness_trial: usize,
    pub witness_seed: u64,
    pub witness_lambda1: f64,
    pub within_epsilon: bool,
    /// Size of the largest component, which is what gets labelled.
    pub n: usize,
    pub m: usize,
    pub rank: usize,
    pub words_reduced: bool,
    pub immersion_verified: bool,
    pub certificate: GrowthCertificate,
    pub certificate_pass: bool,
    pub basis: SubgroupBasis,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub files: Vec<String>,
}

pub fn cmd_emit_subgroup(cfg: &ExperimentConfig) -> Result<CommandOutput> {
    let (density, graph) = density_search(cfg)?;
    let (witness, sample) = density
        .witness
        .zip(graph)
        .ok_or_else(|| Error::Statistics("every trial failed; no witness graph".into()))?;
    let g = sample.graph.as_multi().largest_component();
    let labeled = immerse(&g, cfg.r)?;
    let immersion_verified = labeled.verify_immersion().is_ok();
    let basis = subgroup_basis(&labeled, 0)?;
    let words_reduced = basis.words.iter().all(|w| w.is_reduced() && !w.is_empty());
    let certificate = subgroup_growth_certificate(&labeled, cfg.certificate_depth)?;
    let certificate_pass = certificate.holds(cfg.certificate_tol);

    let mut files = Vec::new();
    if let Some(dir) = &cfg.out_dir {
        fs::create_dir_all(dir)?;
        let outputs = [
            ("labeled_graph.txt", labeled.to_text()),
            ("basis.json", serde_json::to_string_pretty(&basis)? + "\n"),
            ("certificate.json", serde_json::to_string_pretty(&certificate)? + "\n"),
        ];
        for (name, body) in outputs {
            let path = dir.join(name);
            fs::write(&path, body)?;
            files.push(path.display().to_string());
        }
    }

    let report = SubgroupReport {
        schema_version: SCHEMA_VERSION,
        command: Command::EmitSubgroup.name(),
        config: cfg.clone(),
        witness_trial: witness.trial,
        witness_seed: witness.seed,
        witness_lambda1: witness.lambda1,
        within_epsilon: witness.abs_error <= cfg.epsilon,
        n: g.n(),
        m: g.m(),
        rank: basis.rank,
        words_reduced,
        immersion_verified,
        certificate,
        certificate_pass,
        basis,
        files,
    };
    let outcome = if !certificate_pass || !words_reduced || report.rank + g.n() != g.m() + 1 {
        Outcome::CertificateFailure
    } else {
        Outcome::Success
    };
    CommandOutput::new(&report, None, outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_pipeline() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            n: 200,
            trials: 5,
            epsilon: 0.1,
            out_dir: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let out = cmd_emit_subgroup(&cfg).unwrap();
        let r = &out.report;
        assert_eq!(r["rank"].as_u64().unwrap() + r["n"].as_u64().unwrap(), r["m"].as_u64().unwrap() + 1);
        assert_eq!(r["words_reduced"], true);
        assert_eq!(r["files"].as_array().unwrap().len(), 3);
        let basis: SubgroupBasis =
            serde_json::from_str(&fs::read_to_string(dir.path().join("basis.json")).unwrap()).unwrap();
        assert_eq!(basis.rank, basis.words.len());
    }
}
