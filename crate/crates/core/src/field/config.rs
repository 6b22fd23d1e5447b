use super::{BicubicTable, CurvatureField, Family, WaveParams};
use crate::{Error, Result};
use serde::Serialize;
use std::path::Path;

/// Parsed field configuration (`key=value` lines).
///
/// Keys: `family`, `kappa0`, `amplitude`, `wave1`, `wave2`, `phase`, and for
/// `user-table` fields `table` (a path, relative to the config file).
/// `allow_flat=true` with `kappa0=0` selects the validation-only flat field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FieldConfig {
    pub family: Family,
    pub kappa0: Option<f64>,
    pub amplitude: f64,
    pub params: WaveParams,
    pub table: Option<String>,
    pub allow_flat: bool,
}

impl FieldConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut family = None;
        let mut kappa0 = None;
        let mut amplitude = 0.0;
        let mut params = WaveParams::default();
        let mut table = None;
        let mut allow_flat = false;
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            let num = || -> Result<f64> {
                v.parse::<f64>()
                    .map_err(|_| Error::Config(format!("line {}: '{v}' is not a number", no + 1)))
            };
            match k {
                "family" => family = Some(Family::parse(v)?),
                "kappa0" => kappa0 = Some(num()?),
                "amplitude" => amplitude = num()?,
                "wave1" => params.wave1 = num()?,
                "wave2" => params.wave2 = num()?,
                "phase" => params.phase = num()?,
                "table" => table = Some(v.to_string()),
                "allow_flat" => {
                    allow_flat = v.parse::<bool>().map_err(|_| {
                        Error::Config(format!("line {}: expected true/false", no + 1))
                    })?
                }
                other => {
                    return Err(Error::Config(format!(
                        "line {}: unknown key '{other}'",
                        no + 1
                    )))
                }
            }
        }
        let family = family.ok_or_else(|| Error::Config("missing key 'family'".into()))?;
        Ok(FieldConfig {
            family,
            kappa0,
            amplitude,
            params,
            table,
            allow_flat,
        })
    }

    /// Build the field; `base` resolves a relative table path.
    pub fn build(&self, base: Option<&Path>) -> Result<CurvatureField> {
        let wrap = |e: Error| match e {
            Error::Config(_) => e,
            other => Error::Config(other.to_string()),
        };
        let field = match self.family {
            Family::Constant => {
                let k = self
                    .kappa0
                    .ok_or_else(|| Error::Config("constant family needs kappa0".into()))?;
                if self.allow_flat && k == 0.0 {
                    return Ok(CurvatureField::flat_for_validation());
                }
                if self.amplitude != 0.0 {
                    return Err(Error::Config("constant family takes amplitude 0".into()));
                }
                CurvatureField::constant(k).map_err(wrap)?
            }
            Family::CosineBump => {
                CurvatureField::cosine_bump(self.amplitude, self.params).map_err(wrap)?
            }
            Family::ProductWave => {
                CurvatureField::product_wave(self.amplitude, self.params).map_err(wrap)?
            }
            Family::UserTable => {
                let rel = self
                    .table
                    .as_ref()
                    .ok_or_else(|| Error::Config("user-table family needs table=".into()))?;
                let path = match base {
                    Some(b) => b.join(rel),
                    None => Path::new(rel).to_path_buf(),
                };
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    Error::Config(format!("cannot read table {}: {e}", path.display()))
                })?;
                CurvatureField::from_table(BicubicTable::parse(&text)?).map_err(wrap)?
            }
        };
        if let Some(k) = self.kappa0 {
            if self.family != Family::Constant && (field.kappa0() - k).abs() > 1e-14 {
                return Err(Error::Config(format!(
                    "kappa0 = {k} disagrees with K(0,0) = {} for this family",
                    field.kappa0()
                )));
            }
        }
        Ok(field)
    }

    /// Read and build from a file.
    pub fn load(path: &Path) -> Result<(FieldConfig, CurvatureField)> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg = FieldConfig::parse(&text)?;
        let field = cfg.build(path.parent())?;
        Ok((cfg, field))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_bump() {
        let c = FieldConfig::parse(
            "family=cosine-bump\namplitude=1e-3\nwave1=1\nwave2=1\nphase=0 # origin peak\n",
        )
        .unwrap();
        assert_eq!(c.family, Family::CosineBump);
        let f = c.build(None).unwrap();
        assert!((f.kappa0() - 1.001).abs() < 1e-15);
    }

    #[test]
    fn parse_errors() {
        assert!(FieldConfig::parse("amplitude=1").is_err());
        assert!(FieldConfig::parse("family=torus").is_err());
        assert!(FieldConfig::parse("family=constant\nkappa0=abc").is_err());
        assert!(FieldConfig::parse("family=constant\ncolour=red").is_err());
        let c = FieldConfig::parse("family=constant\nkappa0=0.5").unwrap();
        assert!(matches!(c.build(None), Err(Error::Config(_))));
        let c = FieldConfig::parse("family=cosine-bump\namplitude=1e-3\nkappa0=1.5").unwrap();
        assert!(c.build(None).is_err());
    }

    #[test]
    fn flat_field_is_gated() {
        let c = FieldConfig::parse("family=constant\nkappa0=0").unwrap();
        assert!(c.build(None).is_err());
        let c = FieldConfig::parse("family=constant\nkappa0=0\nallow_flat=true").unwrap();
        assert!(c.build(None).unwrap().is_flat());
    }
}
