//! Bundled reference data: four elliptic curves, seven newform prefixes,
//! and frozen regression constants.
//!
//! Curves ship as globally minimal models with their conductor and a
//! caller-asserted `has_cyclic_4_isogeny` flag; nothing here computes
//! isogenies or runs Tate's algorithm. Form prefixes are short published
//! q-expansions, trusted only up to their stated bound: the weight-2
//! ones cross-check the point-count pipeline, the higher-weight ones are
//! congruence counterparties. The regression file pins constants that an
//! oracle sweep fixed once (with the generation date), so later runs
//! assert equality instead of re-deriving them.
//!
//! [`FixtureSet::builtin`] embeds the data files at compile time;
//! [`FixtureSet::from_dir`] reads the same layout from disk, which lets
//! tests inject faults and lets callers substitute their own data.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::elliptic::CurveQ;
use crate::qseries::{load_qexp, QExpRecord, QExpansion};
use crate::{Error, Result};

/// Serialized form of one curve entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveRecord {
    pub label: String,
    /// [a1, a2, a3, a4, a6] of the minimal model.
    pub coefficients: [i64; 5],
    pub conductor: u64,
    pub has_cyclic_4_isogeny: bool,
}

/// A validated curve with its asserted isogeny flag.
#[derive(Debug, Clone)]
pub struct FixtureCurve {
    pub label: String,
    pub curve: CurveQ,
    pub conductor: u64,
    pub has_cyclic_4_isogeny: bool,
}

/// Minimal constant for the sum-of-two-squares interval scan, fixed by
/// one exhaustive sweep and frozen.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRegression {
    pub level: u64,
    pub delta: String,
    pub x_min: u64,
    pub x_max: u64,
    /// Formatted exactly as scan reports print it, so comparisons are
    /// byte-wise.
    pub c: String,
    pub max_gap: u64,
}

/// Location of the largest zero-run-to-n^(1/4) ratio in a gap scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GapRegression {
    pub label: String,
    pub n_min: u64,
    pub n_max: u64,
    pub n: u64,
    pub run_length: u64,
}

/// Frozen constants with their generation date.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Regression {
    pub generated: String,
    pub s2s_minimal_c: ScanRegression,
    pub gap_peak: GapRegression,
}

/// All bundled data, addressable by label.
pub struct FixtureSet {
    curves: BTreeMap<String, FixtureCurve>,
    forms: BTreeMap<String, QExpansion>,
    regression: Regression,
}

const CURVES_JSON: &str = include_str!("../fixtures/curves.json");
const REGRESSION_JSON: &str = include_str!("../fixtures/regression.json");
const FORM_JSONS: [&str; 7] = [
    include_str!("../fixtures/forms/f_24_2.json"),
    include_str!("../fixtures/forms/f_24_4.json"),
    include_str!("../fixtures/forms/f_12_10.json"),
    include_str!("../fixtures/forms/f_32_2.json"),
    include_str!("../fixtures/forms/f_32_4_3.json"),
    include_str!("../fixtures/forms/f_15_2.json"),
    include_str!("../fixtures/forms/f_15_4.json"),
];

impl FixtureSet {
    /// The compiled-in data set.
    pub fn builtin() -> Result<Self> {
        let curves: Vec<CurveRecord> = serde_json::from_str(CURVES_JSON)?;
        let mut forms = Vec::with_capacity(FORM_JSONS.len());
        for json in FORM_JSONS {
            forms.push(serde_json::from_str(json)?);
        }
        let regression: Regression = serde_json::from_str(REGRESSION_JSON)?;
        Self::assemble(curves, forms, regression)
    }

    /// Read the same layout from `dir`: curves.json, regression.json,
    /// and every *.json under forms/.
    pub fn from_dir(dir: &Path) -> Result<Self> {
        let curves: Vec<CurveRecord> =
            serde_json::from_str(&std::fs::read_to_string(dir.join("curves.json"))?)?;
        let regression: Regression =
            serde_json::from_str(&std::fs::read_to_string(dir.join("regression.json"))?)?;
        let mut forms = Vec::new();
        let mut entries: Vec<_> = std::fs::read_dir(dir.join("forms"))?
            .collect::<std::io::Result<Vec<_>>>()?
            .into_iter()
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "json"))
            .collect();
        entries.sort();
        for path in entries {
            forms.push(serde_json::from_str(&std::fs::read_to_string(path)?)?);
        }
        Self::assemble(curves, forms, regression)
    }

    fn assemble(
        curves: Vec<CurveRecord>,
        forms: Vec<QExpRecord>,
        regression: Regression,
    ) -> Result<Self> {
        let mut curve_map = BTreeMap::new();
        for rec in curves {
            let curve = CurveQ::new(rec.coefficients)?
                .with_label(&rec.label)
                .with_conductor(rec.conductor);
            if curve_map
                .insert(
                    rec.label.clone(),
                    FixtureCurve {
                        label: rec.label.clone(),
                        curve,
                        conductor: rec.conductor,
                        has_cyclic_4_isogeny: rec.has_cyclic_4_isogeny,
                    },
                )
                .is_some()
            {
                return Err(Error::schema(format!("duplicate curve label {}", rec.label)));
            }
        }
        let mut form_map = BTreeMap::new();
        for rec in &forms {
            let label = rec
                .label
                .clone()
                .ok_or_else(|| Error::schema("fixture form without a label"))?;
            if form_map.insert(label.clone(), load_qexp(rec)?).is_some() {
                return Err(Error::schema(format!("duplicate form label {label}")));
            }
        }
        Ok(FixtureSet {
            curves: curve_map,
            forms: form_map,
            regression,
        })
    }

    pub fn curve(&self, label: &str) -> Result<&FixtureCurve> {
        self.curves
            .get(label)
            .ok_or_else(|| Error::unknown("curve label", label))
    }

    pub fn form(&self, label: &str) -> Result<&QExpansion> {
        self.forms
            .get(label)
            .ok_or_else(|| Error::unknown("form label", label))
    }

    pub fn curves(&self) -> impl Iterator<Item = &FixtureCurve> {
        self.curves.values()
    }

    pub fn curve_labels(&self) -> Vec<&str> {
        self.curves.keys().map(String::as_str).collect()
    }

    pub fn form_labels(&self) -> Vec<&str> {
        self.forms.keys().map(String::as_str).collect()
    }

    pub fn regression(&self) -> &Regression {
        &self.regression
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn builtin_loads_and_resolves() {
        let set = FixtureSet::builtin().unwrap();
        assert_eq!(set.curve_labels(), ["15a7", "24a3", "32a4", "e0"]);
        assert_eq!(
            set.form_labels(),
            ["f_12_10", "f_15_2", "f_15_4", "f_24_2", "f_24_4", "f_32_2", "f_32_4_3"]
        );
        let e0 = set.curve("e0").unwrap();
        assert_eq!(e0.conductor, 42);
        assert!(e0.has_cyclic_4_isogeny);
        assert!(matches!(
            set.curve("99z9"),
            Err(Error::Unknown { kind: "curve label", .. })
        ));
    }

    #[test]
    fn form_prefixes_match_published_values() {
        let set = FixtureSet::builtin().unwrap();
        let f24 = set.form("f_24_4").unwrap();
        assert_eq!(f24.weight(), 4);
        assert_eq!(f24.level(), 24);
        assert_eq!(f24.bound(), 19);
        assert_eq!(f24.coeff(13).unwrap(), &BigInt::from(-74));
        let f12 = set.form("f_12_10").unwrap();
        assert_eq!(f12.coeff(11).unwrap(), &BigInt::from(70596));
        let f15 = set.form("f_15_4").unwrap();
        assert_eq!(f15.coeff(2).unwrap(), &BigInt::from(1));
        let f32 = set.form("f_32_4_3").unwrap();
        assert_eq!(f32.coeff(9).unwrap(), &BigInt::from(37));
    }

    #[test]
    fn every_curve_fixture_is_minimal_model_consistent() {
        let set = FixtureSet::builtin().unwrap();
        for fc in set.curves() {
            assert_eq!(fc.curve.conductor(), Some(fc.conductor));
            assert_eq!(fc.curve.label(), Some(fc.label.as_str()));
        }
    }

    #[test]
    fn dir_round_trip_matches_builtin() {
        let set = FixtureSet::from_dir(Path::new(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/fixtures"
        )))
        .unwrap();
        let builtin = FixtureSet::builtin().unwrap();
        assert_eq!(set.curve_labels(), builtin.curve_labels());
        assert_eq!(set.form_labels(), builtin.form_labels());
        assert_eq!(set.regression().generated, builtin.regression().generated);
    }

    #[test]
    fn missing_dir_is_io_error() {
        assert!(matches!(
            FixtureSet::from_dir(Path::new("/nonexistent/fixtures")),
            Err(Error::Io(_))
        ));
    }

    #[test]
    #[ignore = "oracle sweep; run once to regenerate regression.json"]
    fn regenerate_regression_constants() {
        use crate::elliptic::counting::counter_by_name;
        use crate::intervals::{estimate_constant, predicate_by_name};
        use num_rational::Ratio;

        let rep = estimate_constant(
            48,
            10_000,
            1_000_000,
            Ratio::new(1, 4),
            predicate_by_name("s2s").unwrap(),
        )
        .unwrap();
        println!("s2s minimal c = {} max_gap = {}", rep.c, rep.max_gap_observed);

        let set = FixtureSet::builtin().unwrap();
        let fc = set.curve("24a3").unwrap();
        let f = crate::qseries::from_curve(
            &fc.curve,
            fc.conductor,
            100_000,
            counter_by_name("auto").unwrap(),
        )
        .unwrap();
        let gaps = crate::gaps::gap_scan(
            &f,
            1_000,
            100_000,
            crate::gaps::GapConvention::AfterNonzero,
            None,
        )
        .unwrap();
        println!("gap peak at {:?}", gaps.max_ratio_at);
    }
}
