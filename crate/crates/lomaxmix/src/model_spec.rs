//! Inline mixture specifications of the form `c,b,v;c,b,v;...`.

use lomaxmix_core::{LomaxComponent, MixtureModel};

use crate::error::CliError;

/// Largest deviation of the weight sum from one that is silently
/// renormalized.
pub const SPEC_WEIGHT_TOLERANCE: f64 = 1e-9;

pub fn parse_model_spec(text: &str) -> Result<MixtureModel, CliError> {
    let mut components = Vec::new();
    for (i, part) in text.split(';').map(str::trim).enumerate() {
        if part.is_empty() {
            continue;
        }
        let fields: Vec<&str> = part.split(',').map(str::trim).collect();
        let [c, b, v] = fields[..] else {
            return Err(CliError::Input(format!(
                "component {}: expected c,b,v but found {part:?}",
                i + 1
            )));
        };
        let num = |name: &str, s: &str| {
            s.parse::<f64>().map_err(|_| {
                CliError::Input(format!(
                    "component {}: {name} = {s:?} is not a number",
                    i + 1
                ))
            })
        };
        let comp = LomaxComponent::new(num("c", c)?, num("b", b)?, num("v", v)?)
            .map_err(|e| CliError::Input(format!("component {}: {e}", i + 1)))?;
        components.push(comp);
    }
    if components.is_empty() {
        return Err(CliError::Input(
            "model specification has no components".into(),
        ));
    }
    let total: f64 = components.iter().map(|c| c.weight()).sum();
    if (total - 1.0).abs() > SPEC_WEIGHT_TOLERANCE {
        return Err(CliError::Input(format!(
            "component weights sum to {total}, expected 1"
        )));
    }
    MixtureModel::normalized(components).map_err(|e| CliError::Input(e.to_string()))
}
