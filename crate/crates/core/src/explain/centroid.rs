//! The nearest-centroid toy classifier, in exact rational arithmetic.
//!
//! The classifier assigns a query point the label whose class has the
//! smallest mean squared distance to it. Its decision is a proof of
//! "the point is labeled L" in the loose sense of the data-centric
//! examples, and the corresponding explanation pair is the fixed
//! classifier combinator applied to the entire dataset plus query. The
//! interesting output is the report: for any sizable dataset the input
//! serialization dwarfs the statement, so the size threshold fails and
//! the run is classified as data-too-large-to-explain.
//!
//! Rationals keep ties exact: an exact tie is an error, never an
//! arbitrary pick.

use num_traits::Zero;
use std::collections::BTreeMap;
use std::str::FromStr;

use super::{ExplInput, Explanation, ExplanationReport, ExplProgram, ExplainError, ReportParams};
use crate::{Int, Ratio};

/// Labeled points of uniform dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    points: Vec<(Vec<Ratio>, String)>,
}

impl LabeledDataset {
    pub fn new(points: Vec<(Vec<Ratio>, String)>) -> Result<LabeledDataset, ExplainError> {
        let Some(dim) = points.first().map(|(v, _)| v.len()) else {
            return Err(ExplainError::EmptyDataset);
        };
        if dim == 0 {
            return Err(ExplainError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for (v, _) in &points {
            if v.len() != dim {
                return Err(ExplainError::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
        }
        Ok(LabeledDataset { points })
    }

    pub fn points(&self) -> &[(Vec<Ratio>, String)] {
        &self.points
    }

    pub fn dim(&self) -> usize {
        self.points[0].0.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One `v1,...,vd,label` line per point.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (v, label) in &self.points {
            out.push_str(&row_csv(v));
            out.push(',');
            out.push_str(label);
            out.push('\n');
        }
        out
    }

    /// Parse the `to_csv` format; rationals may be written `p/q` or as
    /// plain integers.
    pub fn from_csv(text: &str) -> Result<LabeledDataset, ExplainError> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields: Vec<&str> = line.split(',').collect();
            let label = fields
                .pop()
                .ok_or_else(|| ExplainError::BadInput(format!("line {}: empty", lineno + 1)))?;
            let coords = fields
                .iter()
                .map(|f| parse_ratio(f.trim()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ExplainError::BadInput(format!("line {}: {e}", lineno + 1)))?;
            points.push((coords, label.trim().to_string()));
        }
        LabeledDataset::new(points)
    }
}

pub fn parse_ratio(text: &str) -> Result<Ratio, String> {
    match text.split_once('/') {
        Some((n, d)) => {
            let n = Int::from_str(n.trim()).map_err(|e| e.to_string())?;
            let d = Int::from_str(d.trim()).map_err(|e| e.to_string())?;
            if d.is_zero() {
                return Err("zero denominator".into());
            }
            Ok(Ratio::new(n, d))
        }
        None => {
            let n = Int::from_str(text).map_err(|e| e.to_string())?;
            Ok(Ratio::from_integer(n))
        }
    }
}

pub fn ratio_csv(r: &Ratio) -> String {
    if r.denom() == &Int::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn row_csv(v: &[Ratio]) -> String {
    v.iter().map(ratio_csv).collect::<Vec<_>>().join(",")
}

/// Squared Euclidean distance, exact.
fn squared_distance(a: &[Ratio], b: &[Ratio]) -> Ratio {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = x - y;
            &d * &d
        })
        .fold(Ratio::zero(), |acc, d| acc + d)
}

/// Mean squared distance of the query to each label's points.
pub fn mean_distances(
    dataset: &LabeledDataset,
    query: &[Ratio],
) -> Result<BTreeMap<String, Ratio>, ExplainError> {
    if dataset.is_empty() {
        return Err(ExplainError::EmptyDataset);
    }
    if query.len() != dataset.dim() {
        return Err(ExplainError::DimensionMismatch {
            expected: dataset.dim(),
            found: query.len(),
        });
    }
    let mut sums: BTreeMap<String, (Ratio, u64)> = BTreeMap::new();
    for (point, label) in dataset.points() {
        let entry = sums
            .entry(label.clone())
            .or_insert_with(|| (Ratio::zero(), 0));
        entry.0 += squared_distance(point, query);
        entry.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(label, (sum, count))| {
            (label, sum / Ratio::from_integer(Int::from(count)))
        })
        .collect())
}

/// The statement the classifier asserts about a query.
pub fn classification_statement(query: &[Ratio], label: &str) -> String {
    format!("label(({})) = {label}", row_csv(query))
}

/// Classify a query by nearest mean squared distance, and wrap the
/// decision as an explanation of the statement "the point is labeled
/// L": the program is the fixed classifier combinator, the input is the
/// whole dataset plus the query. An exact tie is an error.
pub fn centroid_classify(
    dataset: &LabeledDataset,
    query: &[Ratio],
    params: &ReportParams,
) -> Result<(String, Explanation, ExplanationReport), ExplainError> {
    let distances = mean_distances(dataset, query)?;
    let (best_label, best) = distances
        .iter()
        .min_by(|(_, a), (_, b)| a.cmp(b))
        .map(|(l, d)| (l.clone(), d.clone()))
        .expect("dataset nonempty");
    for (label, d) in &distances {
        if label != &best_label && d == &best {
            return Err(ExplainError::Tie(best_label, label.clone()));
        }
    }
    let explanation = Explanation {
        program: ExplProgram::Centroid,
        input: ExplInput::Dataset(dataset.clone(), query.to_vec()),
    };
    // arithmetic cost: one subtraction and multiplication per
    // coordinate plus the accumulation, then one division per class and
    // the comparisons
    let classes = distances.len() as u64;
    let run_steps =
        dataset.len() as u64 * (3 * dataset.dim() as u64) + classes + (classes - 1);
    let statement = classification_statement(query, &best_label);
    let report = ExplanationReport::new(
        super::program_source(&explanation.program).len() as u64,
        super::input_source(&explanation.input).len() as u64,
        statement,
        run_steps,
        &params.alpha,
    );
    Ok((best_label, explanation, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: i64) -> Ratio {
        Ratio::from_integer(Int::from(v))
    }

    fn two_clusters() -> LabeledDataset {
        let mut points = Vec::new();
        for (dx, dy) in [(0, 0), (1, 0), (0, 1), (-1, 0), (0, -1)] {
            points.push((vec![r(dx), r(dy)], "cat".to_string()));
            points.push((vec![r(10 + dx), r(10 + dy)], "dog".to_string()));
        }
        LabeledDataset::new(points).unwrap()
    }

    #[test]
    fn near_cluster_wins() {
        let ds = two_clusters();
        let params = ReportParams::default();
        let (label, _, report) = centroid_classify(&ds, &[r(9), r(9)], &params).unwrap();
        assert_eq!(label, "dog");
        assert!(report.input_bytes > report.statement_bytes);
        assert!(!report.passes_threshold);

        let (label, _, _) = centroid_classify(&ds, &[r(1), r(1)], &params).unwrap();
        assert_eq!(label, "cat");
    }

    #[test]
    fn single_point_classes() {
        let ds = LabeledDataset::new(vec![
            (vec![r(0), r(0)], "a".to_string()),
            (vec![r(4), r(4)], "b".to_string()),
        ])
        .unwrap();
        let params = ReportParams::default();
        let (label, _, _) = centroid_classify(&ds, &[r(0), r(0)], &params).unwrap();
        assert_eq!(label, "a");
    }

    #[test]
    fn midpoint_is_a_tie() {
        let ds = LabeledDataset::new(vec![
            (vec![r(0), r(0)], "a".to_string()),
            (vec![r(4), r(0)], "b".to_string()),
        ])
        .unwrap();
        let params = ReportParams::default();
        assert!(matches!(
            centroid_classify(&ds, &[r(2), r(0)], &params),
            Err(ExplainError::Tie(..))
        ));
    }

    #[test]
    fn scale_invariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xce27);
        let ds = two_clusters();
        let params = ReportParams::default();
        for _ in 0..50 {
            let q = vec![r(rng.gen_range(-3..14)), r(rng.gen_range(-3..14))];
            let scale = r(rng.gen_range(1..20));
            let scaled_points: Vec<(Vec<Ratio>, String)> = ds
                .points()
                .iter()
                .map(|(v, l)| {
                    (v.iter().map(|c| c * &scale).collect(), l.clone())
                })
                .collect();
            let scaled_ds = LabeledDataset::new(scaled_points).unwrap();
            let scaled_q: Vec<Ratio> = q.iter().map(|c| c * &scale).collect();
            let a = centroid_classify(&ds, &q, &params).map(|(l, _, _)| l);
            let b = centroid_classify(&scaled_ds, &scaled_q, &params).map(|(l, _, _)| l);
            match (a, b) {
                (Ok(x), Ok(y)) => assert_eq!(x, y),
                (Err(ExplainError::Tie(..)), Err(ExplainError::Tie(..))) => {}
                (x, y) => panic!("scale changed outcome: {x:?} vs {y:?}"),
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let ds = two_clusters();
        let csv = ds.to_csv();
        let parsed = LabeledDataset::from_csv(&csv).unwrap();
        assert_eq!(parsed, ds);
        assert!(LabeledDataset::from_csv("").is_err());
        assert!(LabeledDataset::from_csv("1,2,a\n1,b\n").is_err());
    }

    #[test]
    fn report_arithmetic_exact() {
        let ds = two_clusters();
        let params = ReportParams::default();
        let (_, _, report) = centroid_classify(&ds, &[r(9), r(9)], &params).unwrap();
        let lhs = &report.ratio * Ratio::from_integer(Int::from(report.statement_bytes));
        let rhs = Ratio::from_integer(Int::from(report.program_bytes + report.input_bytes));
        assert_eq!(lhs, rhs);
    }
}
