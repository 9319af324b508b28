use crate::colour::HomomorphicParams;
use crate::contrast::{ClaheParams, OperatorSpec, PwlParams};
use crate::error::{Error, Result};
use crate::pde::PdeConfig;

use super::{FinisherParams, PipelineSpec, Stage};

pub const PRESET_NAMES: [&str; 12] = [
    "pde-clahe-hs",
    "pde-clahe-goc2",
    "pde-clahe-goc3",
    "pde-clahe-pwl",
    "pde-clahe-cs",
    "pde-hs-clahe",
    "pde-goc2-clahe",
    "pde-goc3-clahe",
    "pde-pwl-clahe",
    "pde-cs-clahe",
    "pa-1",
    "pa-2",
];

pub fn preset_names() -> &'static [&'static str] {
    &PRESET_NAMES
}

/// Mean-anchored evolution whose fidelity term is driven by `ops` applied in
/// order. The global slot is left empty.
pub(crate) fn cascade_config(ops: Vec<OperatorSpec>) -> PdeConfig {
    PdeConfig {
        lambda_global: 0.0,
        local_op: ops,
        global_op: Vec::new(),
        ..PdeConfig::default()
    }
}

/// PWL stretch followed by CLAHE: `CLAHE(PWL(I))`.
fn pwl_clahe() -> PdeConfig {
    cascade_config(vec![
        OperatorSpec::Pwl(PwlParams::default()),
        OperatorSpec::Clahe(ClaheParams::default()),
    ])
}

/// Resolves a preset. For `pde-A-B`, name order is application order:
/// `pde-clahe-goc2` forces the evolution with `GOC2(CLAHE(I))`.
pub fn resolve_named(name: &str) -> Result<PipelineSpec> {
    let stages = match name {
        "pa-1" => vec![
            Stage::XyzCastRemoval,
            Stage::PdeEvolve(pwl_clahe()),
            Stage::FuzzyHomomorphic {
                params: HomomorphicParams::default(),
                conditional: false,
                trigger: FinisherParams::default(),
            },
            Stage::PwlFinisher(FinisherParams::default()),
        ],
        "pa-2" => vec![
            Stage::XyzCastRemoval,
            Stage::PdeEvolve(pwl_clahe()),
            Stage::PwlFinisher(FinisherParams::default()),
        ],
        _ => {
            let ops = name
                .strip_prefix("pde-")
                .and_then(|rest| rest.split_once('-'))
                .filter(|(a, b)| (*a == "clahe") != (*b == "clahe"))
                .and_then(|(a, b)| Some(vec![OperatorSpec::by_name(a)?, OperatorSpec::by_name(b)?]))
                .ok_or_else(|| Error::UnknownPipeline(name.to_string()))?;
            vec![Stage::PdeEvolve(cascade_config(ops))]
        }
    };
    Ok(PipelineSpec {
        name: name.to_string(),
        stages,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_resolves_and_validates() {
        for name in PRESET_NAMES {
            let spec = resolve_named(name).unwrap();
            spec.validate().unwrap();
            assert_eq!(spec.name, name);
            assert_eq!(resolve_named(name).unwrap(), spec);
        }
    }

    #[test]
    fn operator_order_follows_name() {
        let spec = resolve_named("pde-pwl-clahe").unwrap();
        match &spec.stages[..] {
            [Stage::PdeEvolve(cfg)] => {
                assert_eq!(cfg.local_op[0].name(), "pwl");
                assert_eq!(cfg.local_op[1].name(), "clahe");
                assert!(cfg.global_op.is_empty());
            }
            other => panic!("unexpected stages {other:?}"),
        }
        let rev = resolve_named("pde-clahe-pwl").unwrap();
        match &rev.stages[..] {
            [Stage::PdeEvolve(cfg)] => {
                assert_eq!(cfg.local_op[0].name(), "clahe");
                assert_eq!(cfg.local_op[1].name(), "pwl");
            }
            other => panic!("unexpected stages {other:?}"),
        }
    }

    #[test]
    fn unknown_names() {
        for bad in [
            "pde-xyz-magic",
            "pde-clahe-clahe",
            "pde-hs-cs",
            "pa-3",
            "",
            "pde-clahe",
        ] {
            assert!(
                matches!(resolve_named(bad), Err(Error::UnknownPipeline(_))),
                "{bad}"
            );
        }
    }

    #[test]
    fn pa2_is_simpler_than_pa1() {
        let pa1 = resolve_named("pa-1").unwrap();
        let pa2 = resolve_named("pa-2").unwrap();
        assert!(pa2.stages.len() < pa1.stages.len());
    }

    #[test]
    fn presets_survive_toml_dump() {
        for name in PRESET_NAMES {
            let spec = resolve_named(name).unwrap();
            let text = spec.to_toml().unwrap();
            assert_eq!(PipelineSpec::from_toml(&text).unwrap(), spec, "{text}");
        }
    }
}
