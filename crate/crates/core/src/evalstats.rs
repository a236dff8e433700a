//! Usability-evaluation statistics.
//!
//! * task completion time and difficulty means over a task × participant grid;
//! * three-point survey tables (frequency, percentage, mean, band);
//! * the problem-discovery curve `1 - (1 - λ)^n` and its inverse;
//! * subgroup resampling of a user × problem discovery matrix.
//!
//! Everything is kept at full precision; [`round_half_up`] is applied only
//! when reporting.

use std::fmt;
use std::io::Read;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::exec::{map_indexed, Execution};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("matrix has no values")]
    EmptyMatrix,
    #[error("row {row} has {got} values, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("value {value} at task {task}, participant {participant} is not a positive time")]
    NonPositiveTime {
        task: usize,
        participant: usize,
        value: f64,
    },
    #[error("value {value} at task {task}, participant {participant} is outside the 1..5 scale")]
    OutOfScale {
        task: usize,
        participant: usize,
        value: f64,
    },
    #[error("survey table has no items")]
    EmptySurvey,
    #[error("item {item} frequencies sum to {got}, expected {expected}")]
    RowSumMismatch {
        item: usize,
        expected: u32,
        got: u32,
    },
    #[error("mean {0} is outside the 1..3 survey scale")]
    MeanOutOfScale(f64),
    #[error("discovery probability {0} is outside (0, 1]")]
    BadLambda(f64),
    #[error("target proportion {0} is outside (0, 1)")]
    BadTarget(f64),
    #[error("group size must be at least 1")]
    ZeroGroupSize,
    #[error("group size {k} is not within 1..={users}")]
    BadGroupSize { k: usize, users: usize },
    #[error("at least one trial is required")]
    ZeroTrials,
    #[error("discovery matrix needs at least one user")]
    NoUsers,
    #[error("no problem was found by the full group")]
    NoProblemsFound,
    #[error("hit probability {0} is outside [0, 1]")]
    BadHitProbability(f64),
    #[error("csv: {0}")]
    Csv(String),
}

impl From<csv::Error> for EvalError {
    fn from(e: csv::Error) -> Self {
        EvalError::Csv(e.to_string())
    }
}

/// Round half up at `decimals` places, as printed in the report tables.
///
/// A relative nudge absorbs binary representation error so that values
/// like 2.345 (stored as 2.34499…) still round up.
pub fn round_half_up(x: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    let scaled = x * scale;
    (scaled + 0.5 + scaled.abs() * 1e-12).floor() / scale
}

/// A task × participant grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskMatrix {
    pub tasks: Vec<String>,
    pub participants: Vec<String>,
    values: Vec<Vec<f64>>,
}

impl TaskMatrix {
    pub fn new(
        tasks: Vec<String>,
        participants: Vec<String>,
        values: Vec<Vec<f64>>,
    ) -> Result<Self, EvalError> {
        if values.is_empty() || participants.is_empty() {
            return Err(EvalError::EmptyMatrix);
        }
        for (row, r) in values.iter().enumerate() {
            if r.len() != participants.len() {
                return Err(EvalError::RaggedRow {
                    row,
                    expected: participants.len(),
                    got: r.len(),
                });
            }
        }
        if tasks.len() != values.len() {
            return Err(EvalError::RaggedRow {
                row: tasks.len().min(values.len()),
                expected: values.len(),
                got: tasks.len(),
            });
        }
        Ok(TaskMatrix {
            tasks,
            participants,
            values,
        })
    }

    /// Reads `task,P1,...,Pn` CSV: header row of participant labels, one
    /// row per task.
    pub fn from_csv<R: Read>(rdr: R) -> Result<Self, EvalError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(rdr);
        let participants: Vec<String> = r.headers()?.iter().skip(1).map(String::from).collect();
        let mut tasks = Vec::new();
        let mut values = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let mut it = rec.iter();
            tasks.push(it.next().unwrap_or_default().to_string());
            let row = it
                .map(|v| {
                    v.parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| {
                            EvalError::Csv(format!("row {}: `{v}` is not a number", i + 1))
                        })
                })
                .collect::<Result<Vec<_>, _>>()?;
            values.push(row);
        }
        Self::new(tasks, participants, values)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    fn cells(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .flat_map(|(t, r)| r.iter().enumerate().map(move |(p, &v)| (t, p, v)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanReport {
    pub per_task: Vec<f64>,
    pub overall: f64,
}

fn means(m: &TaskMatrix) -> MeanReport {
    let per_task = m
        .values
        .iter()
        .map(|r| r.iter().sum::<f64>() / r.len() as f64)
        .collect();
    let n = m.values.len() * m.participants.len();
    let overall = m.cells().map(|(_, _, v)| v).sum::<f64>() / n as f64;
    MeanReport { per_task, overall }
}

/// Per-task completion time means and the grand mean.
pub fn task_means(m: &TaskMatrix) -> Result<MeanReport, EvalError> {
    if let Some((task, participant, value)) = m.cells().find(|&(_, _, v)| v <= 0.0) {
        return Err(EvalError::NonPositiveTime {
            task,
            participant,
            value,
        });
    }
    Ok(means(m))
}

/// Per-task difficulty means on the 1..5 scale and the grand mean.
pub fn difficulty_means(m: &TaskMatrix) -> Result<MeanReport, EvalError> {
    if let Some((task, participant, value)) = m
        .cells()
        .find(|&(_, _, v)| v.fract() != 0.0 || !(1.0..=5.0).contains(&v))
    {
        return Err(EvalError::OutOfScale {
            task,
            participant,
            value,
        });
    }
    Ok(means(m))
}

/// Verdict bands for a 1..3 survey mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LikertBand {
    No,
    Partly,
    Yes,
}

impl LikertBand {
    pub const ALL: [LikertBand; 3] = [LikertBand::No, LikertBand::Partly, LikertBand::Yes];

    /// Inclusive mean range at two decimals.
    pub fn mean_range(self) -> (f64, f64) {
        match self {
            LikertBand::No => (1.00, 1.66),
            LikertBand::Partly => (1.67, 2.33),
            LikertBand::Yes => (2.34, 3.00),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LikertBand::No => "No",
            LikertBand::Partly => "Partly",
            LikertBand::Yes => "Yes",
        }
    }

    pub fn classify(mean: f64) -> Result<LikertBand, EvalError> {
        let r = round_half_up(mean, 2);
        // compare in hundredths to stay clear of float edges
        let hundredths = (r * 100.0).round() as i64;
        LikertBand::ALL
            .into_iter()
            .find(|b| {
                let (lo, hi) = b.mean_range();
                ((lo * 100.0).round() as i64..=(hi * 100.0).round() as i64).contains(&hundredths)
            })
            .ok_or(EvalError::MeanOutOfScale(mean))
    }
}

impl fmt::Display for LikertBand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyItem {
    pub label: String,
    pub f_no: u32,
    pub f_partly: u32,
    pub f_yes: u32,
}

impl SurveyItem {
    pub fn new(label: impl Into<String>, f_no: u32, f_partly: u32, f_yes: u32) -> Self {
        SurveyItem {
            label: label.into(),
            f_no,
            f_partly,
            f_yes,
        }
    }

    pub fn total(&self) -> u32 {
        self.f_no + self.f_partly + self.f_yes
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurveyTable {
    pub items: Vec<SurveyItem>,
}

impl SurveyTable {
    /// Reads `label,f_no,f_partly,f_yes` CSV with a header row.
    pub fn from_csv<R: Read>(rdr: R) -> Result<Self, EvalError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(rdr);
        let mut items = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != 4 {
                return Err(EvalError::Csv(format!(
                    "row {}: expected 4 fields, found {}",
                    i + 1,
                    rec.len()
                )));
            }
            let f = |j: usize| {
                rec[j].parse::<u32>().map_err(|_| {
                    EvalError::Csv(format!("row {}: `{}` is not a frequency", i + 1, &rec[j]))
                })
            };
            items.push(SurveyItem::new(&rec[0], f(1)?, f(2)?, f(3)?));
        }
        Ok(SurveyTable { items })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItemStats {
    pub label: String,
    /// No, Partly, Yes
    pub freq: [u32; 3],
    pub pct: [f64; 3],
    pub mean: f64,
    /// Population standard deviation of the 1/2/3 codes.
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverallRow {
    pub freq: [f64; 3],
    pub pct: [f64; 3],
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurveyReport {
    pub participants: u32,
    pub items: Vec<ItemStats>,
    pub overall: OverallRow,
    pub band: LikertBand,
}

pub fn survey_stats(t: &SurveyTable) -> Result<SurveyReport, EvalError> {
    let first = t.items.first().ok_or(EvalError::EmptySurvey)?;
    let p = first.total();
    if p == 0 {
        return Err(EvalError::RowSumMismatch {
            item: 0,
            expected: 1,
            got: 0,
        });
    }
    let mut items = Vec::with_capacity(t.items.len());
    for (i, it) in t.items.iter().enumerate() {
        if it.total() != p {
            return Err(EvalError::RowSumMismatch {
                item: i,
                expected: p,
                got: it.total(),
            });
        }
        let freq = [it.f_no, it.f_partly, it.f_yes];
        let pf = p as f64;
        let mean = freq
            .iter()
            .zip(1..=3)
            .map(|(&f, code)| f as f64 * code as f64)
            .sum::<f64>()
            / pf;
        let var = freq
            .iter()
            .zip(1..=3)
            .map(|(&f, code)| f as f64 * (code as f64 - mean).powi(2))
            .sum::<f64>()
            / pf;
        items.push(ItemStats {
            label: it.label.clone(),
            freq,
            pct: freq.map(|f| 100.0 * f as f64 / pf),
            mean,
            std_dev: var.sqrt(),
        });
    }
    let n = items.len() as f64;
    let col = |g: &dyn Fn(&ItemStats) -> f64| items.iter().map(g).sum::<f64>() / n;
    let overall = OverallRow {
        freq: [0, 1, 2].map(|j| col(&|s| s.freq[j] as f64)),
        pct: [0, 1, 2].map(|j| col(&|s| s.pct[j])),
        mean: col(&|s| s.mean),
    };
    let band = LikertBand::classify(overall.mean)?;
    Ok(SurveyReport {
        participants: p,
        items,
        overall,
        band,
    })
}

/// Per-evaluator problem-discovery probability λ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoveryModel {
    lambda: f64,
}

impl DiscoveryModel {
    pub fn new(lambda: f64) -> Result<Self, EvalError> {
        if !(lambda > 0.0 && lambda <= 1.0) {
            return Err(EvalError::BadLambda(lambda));
        }
        Ok(DiscoveryModel { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Expected share of problems found by `n` evaluators.
    pub fn proportion(&self, n: u32) -> f64 {
        discovery_proportion(self, n)
    }
}

pub fn discovery_proportion(model: &DiscoveryModel, n: u32) -> f64 {
    1.0 - (1.0 - model.lambda).powi(n as i32)
}

/// λ for which `n` evaluators find `target_p` of the problems.
pub fn solve_lambda(target_p: f64, n: u32) -> Result<f64, EvalError> {
    if !(target_p > 0.0 && target_p < 1.0) {
        return Err(EvalError::BadTarget(target_p));
    }
    if n == 0 {
        return Err(EvalError::ZeroGroupSize);
    }
    Ok(1.0 - (1.0 - target_p).powf(1.0 / n as f64))
}

/// Which user found which problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscoveryMatrix {
    hits: Vec<Vec<bool>>,
    problems: usize,
}

impl DiscoveryMatrix {
    pub fn new(hits: Vec<Vec<bool>>) -> Result<Self, EvalError> {
        let problems = hits.first().ok_or(EvalError::NoUsers)?.len();
        for (row, r) in hits.iter().enumerate() {
            if r.len() != problems {
                return Err(EvalError::RaggedRow {
                    row,
                    expected: problems,
                    got: r.len(),
                });
            }
        }
        Ok(DiscoveryMatrix { hits, problems })
    }

    /// Reads `user,p1,...,pm` CSV with a header row and 0/1 cells.
    pub fn from_csv<R: Read>(rdr: R) -> Result<Self, EvalError> {
        let mut r = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(rdr);
        let mut hits = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec?;
            let row = rec
                .iter()
                .skip(1)
                .map(|v| match v {
                    "0" => Ok(false),
                    "1" => Ok(true),
                    other => Err(EvalError::Csv(format!(
                        "row {}: `{other}` is not 0 or 1",
                        i + 1
                    ))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            hits.push(row);
        }
        Self::new(hits)
    }

    /// Random matrix where each user finds each problem independently.
    pub fn synthetic(
        users: usize,
        problems: usize,
        p_hit: f64,
        seed: u64,
    ) -> Result<Self, EvalError> {
        if !(0.0..=1.0).contains(&p_hit) {
            return Err(EvalError::BadHitProbability(p_hit));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let hits = (0..users)
            .map(|_| (0..problems).map(|_| rng.gen_bool(p_hit)).collect())
            .collect();
        Self::new(hits)
    }

    pub fn users(&self) -> usize {
        self.hits.len()
    }

    pub fn problems(&self) -> usize {
        self.problems
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.hits
    }

    /// Problems found by at least one user of the full group.
    pub fn found_by_group(&self) -> Vec<usize> {
        (0..self.problems)
            .filter(|&j| self.hits.iter().any(|r| r[j]))
            .collect()
    }

    /// Percentage of `reference` problems found by the given users.
    pub fn percent_found(&self, users: &[usize], reference: &[usize]) -> f64 {
        let found = reference
            .iter()
            .filter(|&&j| users.iter().any(|&u| self.hits[u][j]))
            .count();
        100.0 * found as f64 / reference.len() as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResampleStats {
    pub k: usize,
    pub trials: usize,
    pub min_pct: f64,
    pub mean_pct: f64,
    /// Population standard deviation over trials.
    pub std_pct: f64,
}

/// Draws `trials` random `k`-user subgroups without replacement and scores
/// each by the share of the group's problems it finds.
///
/// Trial `i` uses ChaCha8 seeded with `seed` on stream `i`, so results do
/// not depend on how trials are scheduled across threads.
pub fn subgroup_resample(
    d: &DiscoveryMatrix,
    k: usize,
    trials: usize,
    seed: u64,
    exec: Execution,
) -> Result<ResampleStats, EvalError> {
    if k == 0 || k > d.users() {
        return Err(EvalError::BadGroupSize {
            k,
            users: d.users(),
        });
    }
    if trials == 0 {
        return Err(EvalError::ZeroTrials);
    }
    let reference = d.found_by_group();
    if reference.is_empty() {
        return Err(EvalError::NoProblemsFound);
    }
    let pcts = map_indexed(exec, trials, |trial| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(trial as u64);
        let users = index::sample(&mut rng, d.users(), k).into_vec();
        d.percent_found(&users, &reference)
    });
    let n = pcts.len() as f64;
    let mean = pcts.iter().sum::<f64>() / n;
    let var = pcts.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / n;
    let min = pcts.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ResampleStats {
        k,
        trials,
        min_pct: min,
        mean_pct: mean,
        std_pct: var.sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(18.875, 2), 18.88);
        assert_eq!(round_half_up(3.76875, 2), 3.77);
        assert_eq!(round_half_up(2.345, 2), 2.35);
        assert_eq!(round_half_up(2.344999, 2), 2.34);
        assert_eq!(round_half_up(0.84356611, 4), 0.8436);
    }

    #[test]
    fn row_one_of_times() {
        let row = [
            23., 24., 23., 41., 13., 27., 34., 16., 14., 10., 19., 22., 27., 25., 30., 23., 18.,
            23., 31., 29.,
        ];
        let m = TaskMatrix::new(
            vec!["t1".into()],
            (1..=20).map(|i| format!("P{i}")).collect(),
            vec![row.to_vec()],
        )
        .unwrap();
        let r = task_means(&m).unwrap();
        assert!(close(r.per_task[0], 23.60, 1e-12));
    }

    #[test]
    fn constant_matrix() {
        let m = TaskMatrix::new(
            vec!["a".into(), "b".into()],
            vec!["p".into(), "q".into(), "r".into()],
            vec![vec![4.0; 3]; 2],
        )
        .unwrap();
        for r in [task_means(&m).unwrap(), difficulty_means(&m).unwrap()] {
            assert!(r.per_task.iter().all(|&v| v == 4.0));
            assert_eq!(r.overall, 4.0);
        }
    }

    #[test]
    fn matrix_errors() {
        assert_eq!(
            TaskMatrix::new(vec![], vec!["p".into()], vec![]),
            Err(EvalError::EmptyMatrix)
        );
        assert!(matches!(
            TaskMatrix::new(
                vec!["a".into()],
                vec!["p".into(), "q".into()],
                vec![vec![1.0]]
            ),
            Err(EvalError::RaggedRow { .. })
        ));
        let m = TaskMatrix::new(vec!["a".into()], vec!["p".into()], vec![vec![6.0]]).unwrap();
        assert!(matches!(
            difficulty_means(&m),
            Err(EvalError::OutOfScale { .. })
        ));
        let m = TaskMatrix::new(vec!["a".into()], vec!["p".into()], vec![vec![2.5]]).unwrap();
        assert!(matches!(
            difficulty_means(&m),
            Err(EvalError::OutOfScale { .. })
        ));
        let m = TaskMatrix::new(vec!["a".into()], vec!["p".into()], vec![vec![0.0]]).unwrap();
        assert!(matches!(
            task_means(&m),
            Err(EvalError::NonPositiveTime { .. })
        ));
    }

    #[test]
    fn matrix_csv() {
        let m = TaskMatrix::from_csv("task,P1,P2\nA,1,2\nB, 3 ,4\n".as_bytes()).unwrap();
        assert_eq!(m.tasks, vec!["A", "B"]);
        assert_eq!(m.rows()[1], vec![3.0, 4.0]);
        assert!(TaskMatrix::from_csv("task,P1\nA,x\n".as_bytes()).is_err());
        assert!(TaskMatrix::from_csv("task,P1,P2\nA,1\n".as_bytes()).is_err());
    }

    #[test]
    fn band_boundaries() {
        assert_eq!(LikertBand::classify(1.0), Ok(LikertBand::No));
        assert_eq!(LikertBand::classify(1.66), Ok(LikertBand::No));
        assert_eq!(LikertBand::classify(1.67), Ok(LikertBand::Partly));
        assert_eq!(LikertBand::classify(2.33), Ok(LikertBand::Partly));
        assert_eq!(LikertBand::classify(2.34), Ok(LikertBand::Yes));
        assert_eq!(LikertBand::classify(3.0), Ok(LikertBand::Yes));
        // 1.665 rounds up into Partly
        assert_eq!(LikertBand::classify(1.665), Ok(LikertBand::Partly));
        assert!(LikertBand::classify(0.5).is_err());
        assert!(LikertBand::classify(3.2).is_err());
    }

    #[test]
    fn survey_examples() {
        let t = SurveyTable {
            items: vec![SurveyItem::new("i1", 2, 7, 11)],
        };
        let r = survey_stats(&t).unwrap();
        assert!(close(r.items[0].mean, 2.45, 1e-12));
        assert_eq!(r.items[0].pct, [10.0, 35.0, 55.0]);
        assert_eq!(r.band, LikertBand::Yes);

        let t = SurveyTable {
            items: vec![SurveyItem::new("all-no", 20, 0, 0)],
        };
        let r = survey_stats(&t).unwrap();
        assert_eq!(r.overall.mean, 1.0);
        assert_eq!(r.band, LikertBand::No);
        assert_eq!(r.items[0].std_dev, 0.0);
    }

    #[test]
    fn survey_std_dev() {
        // codes: 10 × 1 and 10 × 3 -> mean 2, population sd 1
        let t = SurveyTable {
            items: vec![SurveyItem::new("split", 10, 0, 10)],
        };
        let r = survey_stats(&t).unwrap();
        assert_eq!(r.items[0].mean, 2.0);
        assert!(close(r.items[0].std_dev, 1.0, 1e-12));
    }

    #[test]
    fn survey_errors() {
        let t = SurveyTable {
            items: vec![
                SurveyItem::new("a", 2, 7, 11),
                SurveyItem::new("b", 2, 7, 10),
            ],
        };
        assert_eq!(
            survey_stats(&t),
            Err(EvalError::RowSumMismatch {
                item: 1,
                expected: 20,
                got: 19
            })
        );
        assert_eq!(
            survey_stats(&SurveyTable { items: vec![] }),
            Err(EvalError::EmptySurvey)
        );
        assert!(SurveyTable::from_csv("label,f_no,f_partly,f_yes\na,1,x,3\n".as_bytes()).is_err());
        assert!(SurveyTable::from_csv("label,f_no,f_partly,f_yes\na,1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn discovery_examples() {
        let m = DiscoveryModel::new(0.42).unwrap();
        assert_eq!(m.proportion(0), 0.0);
        let one = DiscoveryModel::new(1.0).unwrap();
        assert!((1..20).all(|n| one.proportion(n) == 1.0));
        let m = DiscoveryModel::new(0.31).unwrap();
        let direct = 1.0 - 0.69f64 * 0.69 * 0.69 * 0.69 * 0.69;
        assert!(close(m.proportion(5), direct, 1e-15));
        assert!(close(m.proportion(5), 0.8435968651, 1e-9));
        assert!(DiscoveryModel::new(0.0).is_err());
        assert!(DiscoveryModel::new(1.1).is_err());
        assert!(DiscoveryModel::new(f64::NAN).is_err());
    }

    #[test]
    fn solve_examples() {
        let l = solve_lambda(0.75, 5).unwrap();
        assert!(close(l, 1.0 - 0.25f64.powf(0.2), 1e-15));
        assert!(close(l, 0.242142, 1e-6));
        let m = DiscoveryModel::new(l).unwrap();
        assert!(close(m.proportion(5), 0.75, 1e-12));
        assert!(close(solve_lambda(0.5, 1).unwrap(), 0.5, 1e-15));
        assert!(solve_lambda(1.0, 5).is_err());
        assert!(solve_lambda(0.5, 0).is_err());
    }

    #[test]
    fn resample_perfect_and_full_group() {
        let all = DiscoveryMatrix::new(vec![vec![true; 7]; 6]).unwrap();
        for k in 1..=6 {
            let s = subgroup_resample(&all, k, 50, 1, Execution::Sequential).unwrap();
            assert_eq!((s.min_pct, s.mean_pct, s.std_pct), (100.0, 100.0, 0.0));
        }
        let d = DiscoveryMatrix::synthetic(12, 9, 0.3, 7).unwrap();
        let s = subgroup_resample(&d, 12, 20, 3, Execution::Sequential).unwrap();
        assert_eq!((s.min_pct, s.mean_pct, s.std_pct), (100.0, 100.0, 0.0));
    }

    #[test]
    fn resample_errors() {
        let d = DiscoveryMatrix::new(vec![vec![true, false]; 3]).unwrap();
        assert!(matches!(
            subgroup_resample(&d, 0, 1, 0, Execution::Sequential),
            Err(EvalError::BadGroupSize { .. })
        ));
        assert!(matches!(
            subgroup_resample(&d, 4, 1, 0, Execution::Sequential),
            Err(EvalError::BadGroupSize { .. })
        ));
        assert_eq!(
            subgroup_resample(&d, 1, 0, 0, Execution::Sequential),
            Err(EvalError::ZeroTrials)
        );
        let none = DiscoveryMatrix::new(vec![vec![false; 3]; 2]).unwrap();
        assert_eq!(
            subgroup_resample(&none, 1, 1, 0, Execution::Sequential),
            Err(EvalError::NoProblemsFound)
        );
        assert_eq!(DiscoveryMatrix::new(vec![]), Err(EvalError::NoUsers));
    }

    #[test]
    fn resample_is_schedule_independent() {
        let d = DiscoveryMatrix::synthetic(60, 40, 0.3, 11).unwrap();
        let a = subgroup_resample(&d, 5, 500, 42, Execution::Sequential).unwrap();
        let b = subgroup_resample(&d, 5, 500, 42, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let c = subgroup_resample(&d, 5, 500, 43, Execution::Sequential).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn discovery_csv() {
        let d = DiscoveryMatrix::from_csv("user,a,b\nu1,1,0\nu2,0,0\n".as_bytes()).unwrap();
        assert_eq!(d.users(), 2);
        assert_eq!(d.found_by_group(), vec![0]);
        assert!(DiscoveryMatrix::from_csv("user,a\nu1,2\n".as_bytes()).is_err());
    }

    proptest! {
        #[test]
        fn proportion_monotone(l1 in 0.001f64..0.999, l2 in 0.001f64..0.999, n in 0u32..60) {
            let (lo, hi) = if l1 < l2 { (l1, l2) } else { (l2, l1) };
            let a = DiscoveryModel::new(lo).unwrap();
            let b = DiscoveryModel::new(hi).unwrap();
            prop_assert!(a.proportion(n + 1) >= a.proportion(n));
            prop_assert!(a.proportion(n) <= b.proportion(n));
            // strict in the undiscovered share, which does not saturate at 1.0
            prop_assert!((1.0 - lo).powi(n as i32 + 1) < (1.0 - lo).powi(n as i32));
            if n > 0 {
                prop_assert!((1.0 - hi).powi(n as i32) < (1.0 - lo).powi(n as i32));
            }
        }

        #[test]
        fn solve_round_trip(p in 0.01f64..0.99, n in 1u32..30) {
            let l = solve_lambda(p, n).unwrap();
            let m = DiscoveryModel::new(l).unwrap();
            prop_assert!((m.proportion(n) - p).abs() < 1e-12);
        }

        #[test]
        fn percentages_sum_to_100(a in 0u32..30, b in 0u32..30, c in 1u32..30) {
            let r = survey_stats(&SurveyTable { items: vec![SurveyItem::new("x", a, b, c)] }).unwrap();
            prop_assert!((r.items[0].pct.iter().sum::<f64>() - 100.0).abs() <= 0.01);
            prop_assert!(r.items[0].mean >= 1.0 && r.items[0].mean <= 3.0);
        }
    }
}
