//! JSON file formats for states, channels and symplectic transforms, and the
//! `0,1|2|3` partition text syntax.
//!
//! Every real is written with 17 significant digits so that files reproduce
//! matrices bit-exactly when read back.

use std::io;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::channels::{GaussianChannel, SymplecticTransform};
use crate::error::{Error, Result};
use crate::gaussian::{Partition, PartitionedCovariance};
use crate::linalg::SymMatrix;

pub const ORDERING: &str = "qpqp";

/// `{:.16e}`: 17 significant digits, valid as a JSON number.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact JSON formatter that writes every float with 17 significant digits.
struct Sig17;

impl serde_json::ser::Formatter for Sig17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if !value.is_finite() {
            return writer.write_all(b"null");
        }
        writer.write_all(fmt17(value).as_bytes())
    }
}

/// Serializes to JSON with 17-significant-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Sig17);
    value.serialize(&mut ser).map_err(|e| Error::Format(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Format(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub ordering: String,
    pub modes: usize,
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub displacement: Option<Vec<f64>>,
    pub partition: Partition,
}

impl StateFile {
    pub fn from_state(state: &PartitionedCovariance) -> Self {
        StateFile {
            ordering: ORDERING.into(),
            modes: state.modes(),
            matrix: state.cm().rows(),
            displacement: state.displacement().map(|d| d.iter().copied().collect()),
            partition: state.partition().clone(),
        }
    }

    pub fn into_state(self) -> Result<PartitionedCovariance> {
        if self.ordering != ORDERING {
            return Err(Error::Format(format!(
                "unsupported ordering {:?}, expected \"{ORDERING}\"",
                self.ordering
            )));
        }
        let n2 = 2 * self.modes;
        let cm = SymMatrix::new(square_from_rows(&self.matrix, n2, "matrix")?)?;
        let state = PartitionedCovariance::new(cm, self.partition)?;
        match self.displacement {
            Some(d) if d.len() != n2 => Err(Error::Format(format!(
                "displacement has {} entries, expected {n2}",
                d.len()
            ))),
            Some(d) => state.with_displacement(DVector::from_vec(d)),
            None => Ok(state),
        }
    }
}

fn square_from_rows(rows: &[Vec<f64>], n: usize, what: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Format(format!("{what} must be {n}x{n}")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::Format(format!("{what} has non-finite entries")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelFile {
    pub modes: usize,
    #[serde(rename = "K")]
    pub k: Vec<Vec<f64>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<f64>>,
    #[serde(default)]
    pub dbar: Option<Vec<f64>>,
}

impl ChannelFile {
    pub fn from_channel(c: &GaussianChannel) -> Self {
        ChannelFile {
            modes: c.modes(),
            k: rows_of(c.k()),
            m: c.m().rows(),
            dbar: Some(c.dbar().iter().copied().collect()),
        }
    }

    /// Parses and validates (complete positivity included).
    pub fn into_channel(self) -> Result<GaussianChannel> {
        let n2 = 2 * self.modes;
        let k = square_from_rows(&self.k, n2, "K")?;
        let m = square_from_rows(&self.m, n2, "M")?;
        let dbar = match self.dbar {
            Some(d) if d.len() != n2 => return Err(Error::Format(format!("dbar must have {n2} entries"))),
            Some(d) => DVector::from_vec(d),
            None => DVector::zeros(n2),
        };
        GaussianChannel::new(k, m, dbar)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymplecticFile {
    pub modes: usize,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
}

impl SymplecticFile {
    pub fn from_transform(t: &SymplecticTransform) -> Self {
        SymplecticFile {
            modes: t.modes(),
            s: rows_of(t.matrix()),
        }
    }

    pub fn into_transform(self) -> Result<SymplecticTransform> {
        SymplecticTransform::new(square_from_rows(&self.s, 2 * self.modes, "S")?)
    }
}

pub fn parse_state(text: &str) -> Result<PartitionedCovariance> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_state()
}

pub fn write_state(state: &PartitionedCovariance) -> Result<String> {
    to_json(&StateFile::from_state(state))
}

pub fn parse_channel(text: &str) -> Result<GaussianChannel> {
    let file: ChannelFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_channel()
}

pub fn parse_symplectic(text: &str) -> Result<SymplecticTransform> {
    let file: SymplecticFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_transform()
}

/// Parses `"0,1|2|3"` into `[[0,1],[2],[3]]`. Whitespace is ignored.
pub fn parse_partition_text(text: &str) -> Result<Partition> {
    let parse_group = |group: &str| -> Result<Vec<usize>> {
        let group = group.trim();
        if group.is_empty() {
            return Err(Error::InvalidPartition(format!("empty group in {text:?}")));
        }
        group
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidPartition(format!("bad index {tok:?} in {text:?}")))
            })
            .collect()
    };
    text.split('|').map(parse_group).collect()
}

pub fn format_partition_text(partition: &[Vec<usize>]) -> String {
    partition
        .iter()
        .map(|g| g.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("|")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{contiguous_partition, make_random_physical};

    #[test]
    fn partition_text_roundtrip() {
        let p = parse_partition_text("0,1|2| 3").unwrap();
        assert_eq!(p, vec![vec![0, 1], vec![2], vec![3]]);
        assert_eq!(format_partition_text(&p), "0,1|2|3");
        assert!(parse_partition_text("0||1").is_err());
        assert!(parse_partition_text("0,a").is_err());
    }

    #[test]
    fn state_file_is_bit_exact() {
        let s = make_random_physical(3, contiguous_partition(&[1, 2]), 17, 0.6)
            .unwrap()
            .with_displacement(DVector::from_vec(vec![
                0.1,
                0.2,
                1.0 / 3.0,
                1e-300,
                -7.5,
                2.0f64.sqrt(),
            ]))
            .unwrap();
        let text = write_state(&s).unwrap();
        assert!(text.contains("\"ordering\":\"qpqp\""));
        let back = parse_state(&text).unwrap();
        assert_eq!(back, s);
        assert_eq!(write_state(&back).unwrap(), text);
    }

    #[test]
    fn rejects_other_orderings_and_shapes() {
        let bad = r#"{"ordering":"qqpp","modes":1,"matrix":[[1,0],[0,1]],"partition":[[0]]}"#;
        assert!(matches!(parse_state(bad), Err(Error::Format(_))));
        let short = r#"{"ordering":"qpqp","modes":1,"matrix":[[1,0]],"partition":[[0]]}"#;
        assert!(parse_state(short).is_err());
        let part =
            r#"{"ordering":"qpqp","modes":2,"matrix":[[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]],"partition":[[0]]}"#;
        assert!(matches!(parse_state(part), Err(Error::InvalidPartition(_))));
        assert!(parse_state("not json").is_err());
    }

    #[test]
    fn channel_file_roundtrip_and_validation() {
        let c = crate::channels::make_random_channel(1, 3, 0.1).unwrap();
        let text = to_json(&ChannelFile::from_channel(&c)).unwrap();
        assert_eq!(parse_channel(&text).unwrap(), c);
        let amp = r#"{"modes":1,"K":[[2,0],[0,2]],"M":[[0,0],[0,0]],"dbar":[0,0]}"#;
        assert!(matches!(parse_channel(amp), Err(Error::InvalidChannel(_))));
        let no_dbar = r#"{"modes":1,"K":[[1,0],[0,1]],"M":[[0,0],[0,0]]}"#;
        assert!(parse_channel(no_dbar).is_ok());
    }

    #[test]
    fn symplectic_file_roundtrip() {
        let t = SymplecticTransform::random(2, &mut crate::rng::stream_rng(1, 1), 0.3);
        let text = to_json(&SymplecticFile::from_transform(&t)).unwrap();
        assert_eq!(parse_symplectic(&text).unwrap(), t);
        let bad = r#"{"modes":1,"S":[[2,0],[0,2]]}"#;
        assert!(matches!(parse_symplectic(bad), Err(Error::NotSymplectic(_))));
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt17(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt17(-2.0), "-2.0000000000000000e0");
    }
}
