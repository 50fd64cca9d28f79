//! Report documents: a JSON tree whose reals are always written with 17
//! significant digits, so parsing a serialized document gives back the
//! identical values.

use std::io;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::barlow::{BtLossBreakdown, TraceRecord};
use crate::error::{Error, Result};
use crate::fim::EfficiencyReport;
use crate::lab::ValidationResult;

pub const SCHEMA_VERSION: &str = "1";

/// `x` in scientific notation with 17 significant digits; non-finite
/// values become `inf`, `-inf` or `nan`.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

/// Every parameter that can influence a result. Unset fields are omitted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_sq: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_var: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_b: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
}

/// Null directions of a collapsed covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollapseDiagnosis {
    /// Coordinates whose batch variance is zero.
    pub zero_variance_dims: Vec<usize>,
    /// Number of numerically-zero covariance eigenvalues.
    pub null_eigenvalues: usize,
    /// Coordinates with a nonzero loading on some null eigenvector.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub involved_dims: Vec<usize>,
    /// Unit eigenvectors spanning the null space.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub null_directions: Vec<Vec<f64>>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub config: ParamRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub efficiency: Option<EfficiencyReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<BtLossBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_correlation: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub population_cross_correlation: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse: Option<CollapseDiagnosis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_step: Option<TraceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub validations: Vec<ValidationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub all_passed: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl ReportDocument {
    pub fn new(command: impl Into<String>, config: ParamRecord) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            config,
            efficiency: None,
            loss: None,
            cross_correlation: None,
            population_cross_correlation: None,
            collapse: None,
            final_step: None,
            validations: Vec::new(),
            all_passed: None,
            error: None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, RealFormatter::default());
        self.serialize(&mut ser)
            .expect("report fields always serialize");
        buf.push(b'\n');
        String::from_utf8(buf).expect("serializer emits UTF-8")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Self = serde_json::from_str(text).map_err(|e| Error::Parse {
            source_name: "report".into(),
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::Parse {
                source_name: "report".into(),
                location: "schema_version".into(),
                message: format!("unsupported schema version {:?}", doc.schema_version),
            });
        }
        Ok(doc)
    }
}

/// Pretty JSON with reals printed by [`format_real`].
#[derive(Default)]
struct RealFormatter {
    pretty: PrettyFormatter<'static>,
}

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_real(value).as_bytes())
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.pretty.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.pretty.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::ConditionNumber;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[test]
    fn format_real_uses_seventeen_digits() {
        assert_eq!(format_real(1.0), "1.0000000000000000e0");
        assert_eq!(format_real(-0.1), "-1.0000000000000001e-1");
        assert_eq!(format_real(f64::INFINITY), "inf");
    }

    #[test]
    fn reals_appear_in_scientific_form() {
        let mut doc = ReportDocument::new("analyze", ParamRecord::default());
        doc.config.epsilon = Some(0.05);
        doc.config.steps = Some(3);
        let text = doc.to_text();
        assert!(text.contains("\"epsilon\": 5.0000000000000003e-2"), "{text}");
        assert!(text.contains("\"steps\": 3"));
    }

    #[test]
    fn infinite_condition_number_round_trips() {
        let mut doc = ReportDocument::new("analyze", ParamRecord::default());
        doc.efficiency = Some(EfficiencyReport {
            cov_eigenvalues: vec![1.0, 0.0],
            fim_eigenvalues: vec![0.5, 0.0],
            epsilon: 0.05,
            d_eff: 1,
            eta: 0.5,
            condition_number: ConditionNumber::Infinite,
            offdiag_mass: None,
        });
        let text = doc.to_text();
        assert!(text.contains("\"condition_number\": \"inf\""));
        assert_eq!(ReportDocument::parse(&text).unwrap(), doc);
    }

    #[test]
    fn rejects_unknown_schema() {
        let text = ReportDocument::new("loss", ParamRecord::default())
            .to_text()
            .replace("\"schema_version\": \"1\"", "\"schema_version\": \"2\"");
        assert!(ReportDocument::parse(&text).is_err());
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop_oneof![
            any::<f64>().prop_filter("finite", |v| v.is_finite()),
            -1e3f64..1e3,
            Just(0.0),
            Just(-0.0),
            Just(f64::MIN_POSITIVE),
            Just(5e-324),
        ]
    }

    proptest! {
        #[test]
        fn randomized_reports_round_trip(
            cov in prop::collection::vec(finite(), 1..6),
            eps in finite(),
            eta in finite(),
            d_eff in 0usize..100,
            cond in prop::option::of(finite()),
            mass in prop::option::of(finite()),
            loss in (finite(), finite(), finite(), finite()),
            rows in prop::collection::vec(prop::collection::vec(finite(), 3), 0..4),
            measured in prop::collection::btree_map("[a-z_]{1,8}", finite(), 0..4),
            seed in any::<u64>(),
            step in any::<usize>(),
        ) {
            let mut doc = ReportDocument::new("validate", ParamRecord {
                seed: Some(seed),
                lr: Some(loss.0),
                nu: Some(cov.clone()),
                ..ParamRecord::default()
            });
            doc.efficiency = Some(EfficiencyReport {
                fim_eigenvalues: cov.iter().map(|v| v * 0.5).collect(),
                cov_eigenvalues: cov,
                epsilon: eps,
                d_eff,
                eta,
                condition_number: cond.map_or(ConditionNumber::Infinite, ConditionNumber::Finite),
                offdiag_mass: mass,
            });
            doc.loss = Some(BtLossBreakdown {
                invariance: loss.0,
                redundancy: loss.1,
                lambda: loss.2,
                total: loss.3,
            });
            doc.cross_correlation = Some(rows);
            doc.final_step = Some(TraceRecord {
                step,
                invariance: loss.0,
                redundancy: loss.1,
                total: loss.3,
                offdiag_mass: eta,
                diag_gap: eps,
                eta,
            });
            doc.validations.push(ValidationResult {
                name: "lemma1".into(),
                passed: false,
                tolerance: measured.clone(),
                measured,
                observed: BTreeMap::new(),
                config: ParamRecord::default(),
                error: Some("x".into()),
            });
            doc.all_passed = Some(false);
            let parsed = ReportDocument::parse(&doc.to_text()).unwrap();
            prop_assert_eq!(parsed.to_text(), doc.to_text());
            prop_assert_eq!(parsed, doc);
        }
    }
}
