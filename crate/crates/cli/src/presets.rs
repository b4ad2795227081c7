use crate::config::ExperimentSpec;
use crate::error::CliError;

const SOURCES: &[(&str, &str)] = &[
    ("fig1", include_str!("../presets/fig1.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig5a", include_str!("../presets/fig5a.toml")),
    ("fig5b", include_str!("../presets/fig5b.toml")),
    ("fig5c", include_str!("../presets/fig5c.toml")),
    ("fig6a", include_str!("../presets/fig6a.toml")),
    ("fig6b", include_str!("../presets/fig6b.toml")),
    ("fig6c", include_str!("../presets/fig6c.toml")),
    ("fig6d", include_str!("../presets/fig6d.toml")),
    ("memory-effect", include_str!("../presets/memory-effect.toml")),
    ("large-diffusivity", include_str!("../presets/large-diffusivity.toml")),
];

/// Alternative names accepted by [`preset`].
const ALIASES: &[(&str, &str)] = &[("memory", "memory-effect")];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub description: String,
    pub spec: ExperimentSpec,
}

pub fn preset_catalog() -> Vec<Preset> {
    let mut out: Vec<Preset> = SOURCES
        .iter()
        .map(|(name, text)| {
            let spec = ExperimentSpec::from_toml(text).unwrap_or_else(|e| panic!("preset {name}: {e}"));
            Preset {
                name: name.to_string(),
                description: spec.description.clone(),
                spec,
            }
        })
        .collect();
    for (alias, target) in ALIASES {
        let p = out.iter().find(|p| p.name == *target).cloned().expect("alias target exists");
        out.push(Preset {
            name: alias.to_string(),
            description: format!("same as {target}"),
            spec: p.spec,
        });
    }
    out
}

pub fn preset(name: &str) -> Result<ExperimentSpec, CliError> {
    let target = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, t)| t);
    SOURCES
        .iter()
        .find(|(n, _)| *n == target)
        .map(|(_, text)| ExperimentSpec::from_toml(text))
        .unwrap_or_else(|| {
            let known: Vec<&str> = SOURCES.iter().map(|(n, _)| *n).chain(ALIASES.iter().map(|(a, _)| *a)).collect();
            Err(CliError::Validation(vec![format!(
                "unknown preset {name:?}; known presets: {}",
                known.join(", ")
            )]))
        })
}
