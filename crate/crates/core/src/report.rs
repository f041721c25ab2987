//! Output formatting shared by the CLI and the C ABI.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::separability::ScanVerdict;

/// Round-trip-safe decimal: 17 significant digits in scientific notation,
/// `.` as separator, `inf`/`-inf`/`nan` for non-finite values.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

/// Serializes non-finite floats as the strings `"+infinity"`, `"-infinity"`
/// and `"nan"`; finite values stay JSON numbers.
pub mod extended_f64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub const POS_INF: &str = "+infinity";
    pub const NEG_INF: &str = "-infinity";
    pub const NAN: &str = "nan";

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if x.is_nan() {
            s.serialize_str(NAN)
        } else if *x > 0.0 {
            s.serialize_str(POS_INF)
        } else {
            s.serialize_str(NEG_INF)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(x) => Ok(x),
            Repr::Str(s) => match s.as_str() {
                POS_INF => Ok(f64::INFINITY),
                NEG_INF => Ok(f64::NEG_INFINITY),
                NAN => Ok(f64::NAN),
                other => Err(de::Error::custom(format!("unexpected float sentinel '{other}'"))),
            },
        }
    }
}

/// Lowercase hex SHA-256 of the raw input bytes.
pub fn input_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Wall-clock milliseconds spent in each analysis stage.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub parse: f64,
    pub sm_measure: f64,
    pub is_product: f64,
    pub ppt: f64,
    pub segment: f64,
}

/// Summary of a full `analyze` run on one bipartite state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input_digest: String,
    pub dims: (usize, usize),
    pub sm_measure: f64,
    pub is_product: bool,
    pub ppt_min_eigenvalue: f64,
    pub segment_verdict: ScanVerdict,
    pub conclusive: bool,
    pub segment_points: usize,
    pub timings_ms: StageTimings,
}

impl AnalysisReport {
    pub const CSV_HEADER: &'static str =
        "input_digest,n,k,sm_measure,is_product,ppt_min_eigenvalue,segment_verdict,conclusive,segment_points";

    pub fn to_csv(&self) -> String {
        let verdict = match self.segment_verdict {
            ScanVerdict::EntangledDetected => "EntangledDetected",
            ScanVerdict::NoViolationFound => "NoViolationFound",
        };
        format!(
            "{}\n{},{},{},{},{},{},{},{},{}\n",
            Self::CSV_HEADER,
            self.input_digest,
            self.dims.0,
            self.dims.1,
            fmt_f64(self.sm_measure),
            self.is_product,
            fmt_f64(self.ppt_min_eigenvalue),
            verdict,
            self.conclusive,
            self.segment_points
        )
    }
}

/// One row of `sample` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRow {
    pub index: usize,
    pub sm_measure: f64,
    pub ppt_min_eigenvalue: f64,
    /// `true` when the partial transpose is positive within tolerance.
    pub ppt: bool,
}

pub const SAMPLE_CSV_HEADER: &str = "index,sm_measure,ppt_min_eigenvalue,ppt_flag";

pub fn sample_csv(rows: &[SampleRow]) -> String {
    let mut out = format!("{SAMPLE_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.index,
            fmt_f64(r.sm_measure),
            fmt_f64(r.ppt_min_eigenvalue),
            u8::from(r.ppt)
        ));
    }
    out
}
