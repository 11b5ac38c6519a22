//! Feature CSV files.
//!
//! ```text
//! # role: train
//! subject_id,sample_id,f0,f1,f2,f3
//! alice,0,0.12,-0.03,0.4,0.0
//! ```
//!
//! The `# role:` line is optional; other lines starting with `#` are
//! ignored. The header is mandatory and fixes n.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::feature_pipeline::RealFeatureVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Train,
    Eval,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Train => "train",
            Role::Eval => "eval",
        }
    }
}

impl std::str::FromStr for Role {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "train" => Ok(Role::Train),
            "eval" => Ok(Role::Eval),
            other => Err(HarnessError::Config(format!("unknown dataset role `{other}`"))),
        }
    }
}

/// Labelled feature vectors of one length n.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<RealFeatureVector>,
    role: Option<Role>,
}

impl Dataset {
    pub fn new(samples: Vec<RealFeatureVector>, role: Option<Role>) -> Result<Self, HarnessError> {
        let Some(first) = samples.first() else {
            return Err(HarnessError::Config("dataset has no samples".into()));
        };
        let n = first.len();
        if n == 0 {
            return Err(HarnessError::Config("feature vectors must not be empty".into()));
        }
        if let Some(bad) = samples.iter().find(|s| s.len() != n) {
            return Err(HarnessError::Config(format!(
                "sample {}/{} has {} values, expected {n}",
                bad.subject_id,
                bad.sample_id,
                bad.len()
            )));
        }
        Ok(Dataset { samples, role })
    }

    pub fn samples(&self) -> &[RealFeatureVector] {
        &self.samples
    }

    pub fn role(&self) -> Option<Role> {
        self.role
    }

    pub fn with_role(mut self, role: Option<Role>) -> Self {
        self.role = role;
        self
    }

    /// Vector length n.
    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample indices grouped by subject, subjects in order of first
    /// appearance and samples in file order.
    pub fn subjects(&self) -> Vec<(&str, Vec<usize>)> {
        let mut out: Vec<(&str, Vec<usize>)> = Vec::new();
        let mut index = std::collections::HashMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            let slot = *index.entry(s.subject_id.as_str()).or_insert_with(|| {
                out.push((s.subject_id.as_str(), Vec::new()));
                out.len() - 1
            });
            out[slot].1.push(i);
        }
        out
    }

    /// Fails unless every subject has at least two samples, so that each
    /// contributes a mated pair.
    pub fn check_evaluable(&self) -> Result<(), HarnessError> {
        if let Some((s, _)) = self.subjects().into_iter().find(|(_, v)| v.len() < 2) {
            return Err(HarnessError::Config(format!(
                "subject `{s}` has a single sample; evaluation needs at least two per subject"
            )));
        }
        Ok(())
    }

    /// Fails for data tagged as evaluation data.
    pub fn check_trainable(&self) -> Result<(), HarnessError> {
        if self.role == Some(Role::Eval) {
            return Err(HarnessError::Protocol(
                "refusing to fit on a dataset tagged `eval`; fit on training data only".into(),
            ));
        }
        Ok(())
    }
}

fn parse_err(line: u64, message: impl Into<String>) -> HarnessError {
    HarnessError::Parse {
        line,
        message: message.into(),
    }
}

pub fn read_features<R: Read>(mut reader: R) -> Result<Dataset, HarnessError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| parse_err(0, format!("unreadable input: {e}")))?;
    let mut role = None;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix('#') {
            if let Some(r) = rest.trim().strip_prefix("role:") {
                role = Some(r.parse().map_err(|_| parse_err(i as u64 + 1, format!("unknown role `{}`", r.trim())))?);
            }
        } else if !line.is_empty() {
            break;
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr
        .headers()
        .map_err(|e| parse_err(e.position().map_or(1, |p| p.line()), e.to_string()))?
        .clone();
    let header_line = header.position().map_or(1, |p| p.line());
    if header.len() < 3 || &header[0] != "subject_id" || &header[1] != "sample_id" {
        return Err(parse_err(
            header_line,
            "header must be `subject_id,sample_id,<feature columns>`",
        ));
    }
    let n = header.len() - 2;
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| parse_err(e.position().map_or(0, |p| p.line()), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != n + 2 {
            return Err(parse_err(
                line,
                format!("expected {} values, found {}", n, rec.len().saturating_sub(2)),
            ));
        }
        let values = rec
            .iter()
            .skip(2)
            .enumerate()
            .map(|(j, cell)| match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(parse_err(line, format!("column {}: `{cell}` is not a finite number", j + 3))),
            })
            .collect::<Result<Vec<f64>, _>>()?;
        samples.push(RealFeatureVector::new(&rec[0], &rec[1], values));
    }
    if samples.is_empty() {
        return Err(parse_err(header_line, "no data rows"));
    }
    Dataset::new(samples, role)
}

pub fn ingest_features(path: &Path) -> Result<Dataset, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    read_features(BufReader::new(file)).map_err(|e| e.in_file(path))
}

/// Writes the CSV form; values use the shortest representation that parses
/// back to the same f64.
pub fn write_features<W: Write>(data: &Dataset, writer: W) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(writer);
    let io = |e: std::io::Error| parse_err(0, format!("write failed: {e}"));
    if let Some(role) = data.role {
        writeln!(w, "# role: {}", role.name()).map_err(io)?;
    }
    let mut cw = csv::Writer::from_writer(w);
    let mut header = vec!["subject_id".to_string(), "sample_id".to_string()];
    header.extend((0..data.dim()).map(|i| format!("f{i}")));
    let csv_err = |e: csv::Error| parse_err(0, format!("write failed: {e}"));
    cw.write_record(&header).map_err(csv_err)?;
    for s in &data.samples {
        let mut row = vec![s.subject_id.clone(), s.sample_id.clone()];
        row.extend(s.values.iter().map(|v| v.to_string()));
        cw.write_record(&row).map_err(csv_err)?;
    }
    cw.flush().map_err(io)
}

pub fn export_features(data: &Dataset, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    write_features(data, file)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_rows() {
        let d = read_features("subject_id,sample_id,a,b,c,d\nx,0,1,2,3,4\ny,0,0.5,-1,2e-3,0\n".as_bytes()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.dim(), 4);
        assert_eq!(d.role(), None);
        assert_eq!(d.samples()[1].values, vec![0.5, -1.0, 0.002, 0.0]);
    }

    #[test]
    fn short_row_names_its_line() {
        let err = read_features("subject_id,sample_id,a,b,c,d\nx,0,1,2,3,4\ny,0,1,2,3\n".as_bytes()).unwrap_err();
        match err {
            HarnessError::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn bad_cells_and_headers() {
        for (text, line) in [
            ("subject_id,sample_id,a\nx,0,abc\n", 2),
            ("subject_id,sample_id,a\nx,0,1\nx,1,NaN\n", 3),
            ("id,sample,a\nx,0,1\n", 1),
            ("# role: train\n\nsubject_id,sample_id,a\nx,0,1\ny,0,inf\n", 5),
            ("# role: test\nsubject_id,sample_id,a\n", 1),
        ] {
            match read_features(text.as_bytes()) {
                Err(HarnessError::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn role_tag_and_grouping() {
        let d = read_features("# role: eval\n# note\nsubject_id,sample_id,a\nb,0,1\na,0,2\nb,1,3\n".as_bytes()).unwrap();
        assert_eq!(d.role(), Some(Role::Eval));
        assert_eq!(d.subjects(), vec![("b", vec![0, 2]), ("a", vec![1])]);
        assert!(d.check_evaluable().is_err());
        assert!(matches!(d.check_trainable(), Err(HarnessError::Protocol(_))));
    }
}
