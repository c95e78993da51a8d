//! Result records and their renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use mv_entropy::{LogBase, Scalar};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Csv,
    JsonLines,
}

/// A cell or element mass: exact fraction when available, always a decimal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mass {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<String>,
    pub decimal: f64,
}

impl Mass {
    pub fn of<S: Scalar>(value: &S) -> Self {
        Mass {
            fraction: value.to_rational().map(|r| r.to_string()),
            decimal: value.to_f64(),
        }
    }

    fn render(&self) -> String {
        match &self.fraction {
            Some(f) => format!("{f} ({:.8})", self.decimal),
            None => format!("{:.8}", self.decimal),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputValue {
    /// An entropy in the record's log base.
    Entropy(f64),
    Entropies(Vec<f64>),
    Masses(Vec<Mass>),
    Count(u64),
    Counts(Vec<u64>),
    Flag(bool),
    Flags(Vec<bool>),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub command: String,
    pub inputs_digest: String,
    pub numeric: String,
    pub log_base: String,
    pub outputs: BTreeMap<String, OutputValue>,
    pub certificates: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

/// SHA-256 over length-prefixed parts.
pub fn digest(parts: &[&str]) -> String {
    let mut hasher = Sha256::new();
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    hex::encode(hasher.finalize())
}

fn unit_of(symbol: &str) -> &'static str {
    if symbol == LogBase::Two.symbol() {
        LogBase::Two.unit()
    } else {
        LogBase::Natural.unit()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl ResultRecord {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.to_text(),
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::JsonLines => self.to_json_line(),
        }
    }

    pub fn to_json_line(&self) -> String {
        let mut line = serde_json::to_string(self).expect("records always serialize");
        line.push('\n');
        line
    }

    pub fn from_json_line(line: &str) -> serde_json::Result<Self> {
        serde_json::from_str(line)
    }

    pub fn to_text(&self) -> String {
        let unit = unit_of(&self.log_base);
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        let _ = writeln!(out, "inputs_digest: {}", self.inputs_digest);
        let _ = writeln!(out, "numeric: {}", self.numeric);
        let _ = writeln!(out, "log_base: {} ({unit})", self.log_base);
        if !self.certificates.is_empty() {
            let _ = writeln!(out, "certificates: {}", self.certificates.join(", "));
        }
        for (name, value) in &self.outputs {
            let rendered = match value {
                OutputValue::Entropy(v) => format!("{v:.8} {unit}"),
                OutputValue::Entropies(vs) => {
                    let items: Vec<String> = vs.iter().map(|v| format!("{v:.8}")).collect();
                    format!("[{}] {unit}", items.join(", "))
                }
                OutputValue::Masses(ms) => {
                    let items: Vec<String> = ms.iter().map(Mass::render).collect();
                    format!("[{}]", items.join(", "))
                }
                OutputValue::Count(c) => c.to_string(),
                OutputValue::Counts(cs) => format!("{cs:?}"),
                OutputValue::Flag(b) => b.to_string(),
                OutputValue::Flags(bs) => format!("{bs:?}"),
                OutputValue::Text(t) => t.clone(),
            };
            let _ = writeln!(out, "{name} = {rendered}");
        }
        if let Some(ms) = self.timing_ms {
            let _ = writeln!(out, "timing_ms: {ms:.3}");
        }
        out
    }

    /// Long format: one row per scalar or sequence entry. Sequences indexed
    /// by `n` start at 1, mass lists at 0.
    pub fn to_csv(&self) -> String {
        let unit = unit_of(&self.log_base);
        let mut out = String::from("output,index,value,exact,unit\n");
        let mut row = |name: &str, index: String, value: String, exact: &str, unit: &str| {
            let _ = writeln!(
                out,
                "{},{index},{},{},{unit}",
                csv_field(name),
                csv_field(&value),
                csv_field(exact)
            );
        };
        for (n, cert) in self.certificates.iter().enumerate() {
            row("certificate", (n + 1).to_string(), cert.clone(), "", "");
        }
        for (name, value) in &self.outputs {
            match value {
                OutputValue::Entropy(v) => row(name, String::new(), format!("{v:.8}"), "", unit),
                OutputValue::Entropies(vs) => {
                    for (i, v) in vs.iter().enumerate() {
                        row(name, (i + 1).to_string(), format!("{v:.8}"), "", unit);
                    }
                }
                OutputValue::Masses(ms) => {
                    for (i, m) in ms.iter().enumerate() {
                        row(
                            name,
                            i.to_string(),
                            format!("{:.8}", m.decimal),
                            m.fraction.as_deref().unwrap_or(""),
                            "",
                        );
                    }
                }
                OutputValue::Count(c) => row(name, String::new(), c.to_string(), "", ""),
                OutputValue::Counts(cs) => {
                    for (i, c) in cs.iter().enumerate() {
                        row(name, i.to_string(), c.to_string(), "", "");
                    }
                }
                OutputValue::Flag(b) => row(name, String::new(), b.to_string(), "", ""),
                OutputValue::Flags(bs) => {
                    for (i, b) in bs.iter().enumerate() {
                        row(name, (i + 1).to_string(), b.to_string(), "", "");
                    }
                }
                OutputValue::Text(t) => row(name, String::new(), t.clone(), "", ""),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use mv_entropy::ratio;

    fn sample() -> ResultRecord {
        let mut outputs = BTreeMap::new();
        outputs.insert("entropy".into(), OutputValue::Entropy(0.943_348_392_329_039_2));
        outputs.insert("h_n".into(), OutputValue::Entropies(vec![0.1, 1.0 / 3.0]));
        outputs.insert(
            "masses".into(),
            OutputValue::Masses(vec![Mass::of(&ratio(1, 10)), Mass::of(&0.25f64)]),
        );
        outputs.insert("shape".into(), OutputValue::Counts(vec![2, 2]));
        outputs.insert("holds".into(), OutputValue::Flags(vec![true, false]));
        ResultRecord {
            command: "refine".into(),
            inputs_digest: digest(&["a", "b"]),
            numeric: "rational".into(),
            log_base: "e".into(),
            outputs,
            certificates: vec!["exact-vertex-enumeration".into()],
            timing_ms: None,
        }
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let r = sample();
        let line = r.to_json_line();
        assert!(line.ends_with('\n') && !line.trim_end().contains('\n'));
        assert_eq!(ResultRecord::from_json_line(&line).unwrap(), r);
    }

    #[test]
    fn text_uses_eight_decimals_and_units() {
        let text = sample().to_text();
        assert!(text.contains("entropy = 0.94334839 nats"));
        assert!(text.contains("masses = [1/10 (0.10000000), 0.25000000]"));
        assert!(!text.contains("timing"));
    }

    #[test]
    fn csv_rows() {
        let csv = sample().to_csv();
        assert!(csv.contains("h_n,2,0.33333333,,nats\n"));
        assert!(csv.contains("masses,0,0.10000000,1/10,\n"));
        assert!(csv.contains("certificate,1,exact-vertex-enumeration,,\n"));
    }

    #[test]
    fn digest_separates_parts() {
        assert_ne!(digest(&["ab", "c"]), digest(&["a", "bc"]));
        assert_eq!(digest(&["x"]).len(), 64);
    }
}
