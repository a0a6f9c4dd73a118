//! JSON, CSV and text renderings of a command result.

use clap::ValueEnum;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Value;

use super::config::RunConfig;
use super::{CliError, SCHEMA};
use crate::potential::PotentialSpec;
use crate::spectrum::MagneticConfig;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Text => "txt",
        }
    }
}

/// Ordered key/value pairs, serialized as a JSON object in insertion order.
#[derive(Debug, Default, Clone)]
pub struct Summary(pub Vec<(&'static str, Value)>);

impl Summary {
    pub fn push(&mut self, key: &'static str, value: impl Into<Value>) {
        self.0.push((key, value.into()));
    }
}

impl Serialize for Summary {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

/// Flat rows for CSV and text output.
#[derive(Debug, Default, Clone)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip representation; exponent form for very small or large values.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub struct Context<'a> {
    pub command: &'static str,
    pub config: &'a RunConfig,
    pub magnetic: &'a MagneticConfig<f64>,
    pub potential: &'a PotentialSpec<f64>,
}

#[derive(Serialize)]
struct Echo<'a> {
    #[serde(flatten)]
    config: &'a RunConfig,
    resolved: &'a MagneticConfig<f64>,
    q0: f64,
}

#[derive(Serialize)]
struct Envelope<'a, P> {
    schema: &'static str,
    command: &'static str,
    config: Echo<'a>,
    summary: &'a Summary,
    result: &'a P,
}

fn echo<'a>(ctx: &Context<'a>) -> Echo<'a> {
    Echo {
        config: ctx.config,
        resolved: ctx.magnetic,
        q0: ctx.potential.q0(),
    }
}

fn summary_line(summary: &Summary) -> String {
    summary
        .0
        .iter()
        .map(|(k, v)| match v {
            Value::Number(n) => match n.as_f64() {
                Some(x) if !n.is_i64() && !n.is_u64() => format!("{k}={}", num(x)),
                _ => format!("{k}={n}"),
            },
            Value::String(s) => format!("{k}={s}"),
            other => format!("{k}={other}"),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn render<P: Serialize>(
    ctx: &Context,
    summary: &Summary,
    table: &Table,
    result: &P,
) -> Result<String, CliError> {
    let encode = |e: serde_json::Error| CliError::Io(format!("serialization failed: {e}"));
    match ctx.config.format {
        Format::Json => {
            let env = Envelope {
                schema: SCHEMA,
                command: ctx.command,
                config: echo(ctx),
                summary,
                result,
            };
            let mut s = serde_json::to_string_pretty(&env).map_err(encode)?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut out = format!(
                "# schema={SCHEMA} command={}\n# config={}\n",
                ctx.command,
                serde_json::to_string(&echo(ctx)).map_err(encode)?
            );
            if !summary.0.is_empty() {
                out.push_str(&format!("# {}\n", summary_line(summary)));
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.headers)
                .and_then(|_| table.rows.iter().try_for_each(|r| w.write_record(r)))
                .map_err(|e| CliError::Io(e.to_string()))?;
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            out.push_str(&String::from_utf8_lossy(&bytes));
            Ok(out)
        }
        Format::Text => {
            let mut out = format!(
                "schema={SCHEMA} command={}\nconfig={}\n",
                ctx.command,
                serde_json::to_string(&echo(ctx)).map_err(encode)?
            );
            if !summary.0.is_empty() {
                out.push_str(&summary_line(summary));
                out.push('\n');
            }
            for row in &table.rows {
                let line: Vec<String> = table
                    .headers
                    .iter()
                    .zip(row)
                    .map(|(h, v)| {
                        if v.contains(' ') {
                            format!("{h}={v:?}")
                        } else {
                            format!("{h}={v}")
                        }
                    })
                    .collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            Ok(out)
        }
    }
}
