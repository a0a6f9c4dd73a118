//! Run configuration: TOML file merged under command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::render::Format;
use super::{CliError, RunArgs};
use crate::potential::PotentialSpec;
use crate::spectrum::MagneticConfig;

pub const DEFAULT_N_MAX: usize = 20;
pub const DEFAULT_GRID: Grid = Grid {
    lo: 0.0,
    hi: 40.0,
    count: 200,
};

/// Keys accepted in a `--config` file. Every key is optional and the
/// command-line flag of the same name wins.
///
/// ```toml
/// q = "two-step"            # or pieces = [[0.5, 2.0], [0.5, -2.0]], or samples = [...]
/// a = 0.9                   # or B = 1.0, N = 5, j = 0
/// n_max = 20
/// grid = "0:40:200"
/// format = "json"
/// output = "bands.json"
/// ```
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub q: Option<String>,
    pub pieces: Option<Vec<(f64, f64)>>,
    pub samples: Option<Vec<f64>>,
    pub a: Option<f64>,
    #[serde(rename = "B")]
    pub b: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub j: Option<usize>,
    pub n_max: Option<usize>,
    pub grid: Option<String>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
    }

    fn from_args(args: &RunArgs) -> Result<Self, CliError> {
        Ok(Self {
            q: args.q.clone(),
            pieces: args.pieces.as_deref().map(parse_pieces).transpose()?,
            samples: args.samples.as_deref().map(parse_samples).transpose()?,
            a: args.a,
            b: args.b,
            n: args.n,
            j: args.j,
            n_max: args.n_max,
            grid: args.grid.clone(),
            format: args.format,
            output: args.output.clone(),
        })
    }

    fn potential(&self) -> Result<Option<PotentialInput>, CliError> {
        let given = [
            self.q.is_some(),
            self.pieces.is_some(),
            self.samples.is_some(),
        ];
        match given.iter().filter(|&&g| g).count() {
            0 => Ok(None),
            1 => Ok(Some(if let Some(name) = &self.q {
                PotentialInput::Preset { name: name.clone() }
            } else if let Some(pieces) = &self.pieces {
                PotentialInput::Pieces {
                    pieces: pieces.clone(),
                }
            } else {
                PotentialInput::Samples {
                    samples: self.samples.clone().unwrap(),
                }
            })),
            _ => Err(CliError::Usage(
                "give only one of q, pieces, samples".into(),
            )),
        }
    }

    fn magnetic(&self) -> Result<Option<MagneticInput>, CliError> {
        let field = self.b.is_some() || self.n.is_some();
        match (self.a, field) {
            (Some(_), true) => Err(CliError::Usage("a and B/N are mutually exclusive".into())),
            (Some(a), false) => {
                if self.j.is_some() {
                    return Err(CliError::Usage("j requires B and N".into()));
                }
                Ok(Some(MagneticInput::Angle { a }))
            }
            (None, true) => match (self.b, self.n) {
                (Some(b), Some(n)) => Ok(Some(MagneticInput::Field {
                    b,
                    n,
                    j: self.j.unwrap_or(0),
                })),
                _ => Err(CliError::Usage("B and N must be given together".into())),
            },
            (None, false) => {
                if self.j.is_some() {
                    return Err(CliError::Usage("j requires B and N".into()));
                }
                Ok(None)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialInput {
    Preset { name: String },
    Pieces { pieces: Vec<(f64, f64)> },
    Samples { samples: Vec<f64> },
}

impl PotentialInput {
    pub fn build(&self) -> Result<PotentialSpec<f64>, CliError> {
        match self {
            Self::Preset { name } => PotentialSpec::preset(name).ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown potential {name:?} (known: {})",
                    PotentialSpec::<f64>::PRESETS.join(", ")
                ))
            }),
            Self::Pieces { pieces } => PotentialSpec::from_pieces("pieces", pieces)
                .map_err(|e| CliError::Usage(e.to_string())),
            Self::Samples { samples } => PotentialSpec::from_samples("samples", samples)
                .map_err(|e| CliError::Usage(e.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MagneticInput {
    Angle {
        a: f64,
    },
    Field {
        #[serde(rename = "B")]
        b: f64,
        #[serde(rename = "N")]
        n: usize,
        j: usize,
    },
}

impl MagneticInput {
    pub fn build(&self) -> Result<MagneticConfig<f64>, CliError> {
        match *self {
            Self::Angle { a } => MagneticConfig::from_angle(a),
            Self::Field { b, n, j } => MagneticConfig::from_field(b, n, j),
        }
        .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// `count` equally spaced points on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("grid {text:?} is not lo:hi:count"));
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if !lo.is_finite() || !hi.is_finite() || count == 0 || (count > 1 && hi <= lo) {
            return Err(bad());
        }
        Ok(Self { lo, hi, count })
    }

    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| self.lo + step * i as f64).collect()
    }
}

fn parse_number(text: &str) -> Result<f64, CliError> {
    text.trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("not a number: {text:?}")))
}

/// `"w:v,w:v,..."`
pub fn parse_pieces(text: &str) -> Result<Vec<(f64, f64)>, CliError> {
    text.split(',')
        .map(|pair| {
            let (w, v) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("piece {pair:?} is not width:value")))?;
            Ok((parse_number(w)?, parse_number(v)?))
        })
        .collect()
}

/// `"v,v,..."`
pub fn parse_samples(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',').map(parse_number).collect()
}

/// Fully resolved configuration, echoed into every output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub potential: PotentialInput,
    pub magnetic: MagneticInput,
    pub n_max: usize,
    pub grid: Grid,
    pub format: Format,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FileConfig::from_args(args)?;
        let potential = match flags.potential()? {
            Some(p) => p,
            None => file.potential()?.unwrap_or(PotentialInput::Preset {
                name: "zero".into(),
            }),
        };
        let magnetic = match flags.magnetic()? {
            Some(m) => m,
            None => file.magnetic()?.ok_or_else(|| {
                CliError::Usage("a magnetic configuration is required: --a or --B/--N".into())
            })?,
        };
        let n_max = flags.n_max.or(file.n_max).unwrap_or(DEFAULT_N_MAX);
        if n_max == 0 {
            return Err(CliError::Usage("n-max must be at least 1".into()));
        }
        let grid = match flags.grid.as_deref().or(file.grid.as_deref()) {
            Some(text) => Grid::parse(text)?,
            None => DEFAULT_GRID,
        };
        Ok(Self {
            potential,
            magnetic,
            n_max,
            grid,
            format: flags.format.or(file.format).unwrap_or_default(),
            output: flags.output.or(file.output),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        let g = Grid::parse("0:40:400").unwrap();
        assert_eq!(g.points().len(), 400);
        assert_eq!(g.points()[399], 40.0);
        assert_eq!(Grid::parse("-1:1:1").unwrap().points(), vec![-1.0]);
        for bad in ["0:40", "1:0:5", "0:1:0", "a:1:2", "0:inf:3"] {
            assert!(Grid::parse(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn pieces_and_samples() {
        assert_eq!(
            parse_pieces("0.5:2, 0.5:-2").unwrap(),
            vec![(0.5, 2.0), (0.5, -2.0)]
        );
        assert!(parse_pieces("0.5").is_err());
        assert_eq!(parse_samples("1,2,3").unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn file_keys() {
        let f: FileConfig = toml::from_str("q = \"two-step\"\nB = 1.5\nN = 5\nj = 2\n").unwrap();
        assert_eq!(
            f.magnetic().unwrap(),
            Some(MagneticInput::Field { b: 1.5, n: 5, j: 2 })
        );
        assert!(toml::from_str::<FileConfig>("bogus = 1").is_err());
        let f: FileConfig = toml::from_str("a = 0.3\nN = 5").unwrap();
        assert!(f.magnetic().is_err());
        let f: FileConfig = toml::from_str("q = \"zero\"\nsamples = [1.0]").unwrap();
        assert!(f.potential().is_err());
    }
}
