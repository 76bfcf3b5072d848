//! Text formats: TOML documents for games and reports, CSV for
//! fictitious-play trajectories and their per-iteration summaries.
//!
//! Every file starts with a `# schema: <name>/<version>` comment line, which
//! the loaders check before parsing.

use std::io::{BufRead, BufReader, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::equivalence::StrategyBijection;
use crate::error::{Error, Result};
use crate::game::{Monfg, PayoffTensor, StrategySet};
use crate::solvers::Trajectory;

pub const MONFG_SCHEMA: &str = "psequiv-monfg/1";
pub const CONTINUOUS_SCHEMA: &str = "psequiv-continuous/1";
pub const CERTIFICATE_SCHEMA: &str = "psequiv-certificate/1";
pub const NE_REPORT_SCHEMA: &str = "psequiv-ne-report/1";
pub const RUN_SUMMARY_SCHEMA: &str = "psequiv-run-summary/1";
pub const TRAJECTORY_SCHEMA: &str = "psequiv-trajectory/1";
pub const ITERATION_SUMMARY_SCHEMA: &str = "psequiv-iteration-summary/1";

fn header(schema: &str) -> String {
    format!("# schema: {schema}\n")
}

/// Splits off and checks the schema line, returning the rest of the text.
fn strip_header<'a>(text: &'a str, schema: &str) -> Result<&'a str> {
    let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
    match first.trim_end().strip_prefix("# schema: ") {
        Some(found) if found == schema => Ok(rest),
        Some(found) => Err(Error::Format(format!("expected schema {schema}, found {found}"))),
        None => Err(Error::Format(format!("missing '# schema: {schema}' header line"))),
    }
}

/// Serializes `value` as a TOML document tagged with `schema`.
pub fn to_toml_document<T: Serialize>(schema: &str, value: &T) -> Result<String> {
    let body = toml::to_string(value).map_err(|e| Error::Format(e.to_string()))?;
    Ok(header(schema) + &body)
}

pub fn from_toml_document<T: DeserializeOwned>(schema: &str, text: &str) -> Result<T> {
    toml::from_str(strip_header(text, schema)?).map_err(|e| Error::Format(e.to_string()))
}

/// Plain-data form of an MONFG. `payoffs[i][profile]` is player `i`'s payoff
/// vector at the profile with that row-major index (last player fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonfgDocument {
    pub n_players: usize,
    pub action_counts: Vec<usize>,
    pub objective_count: usize,
    pub payoffs: Vec<Vec<Vec<f64>>>,
}

impl MonfgDocument {
    pub fn from_monfg(game: &Monfg) -> Self {
        let d = game.objective_count();
        Self {
            n_players: game.n_players(),
            action_counts: game.action_counts().to_vec(),
            objective_count: d,
            payoffs: game.payoffs().iter().map(|t| t.values().chunks(d).map(<[f64]>::to_vec).collect()).collect(),
        }
    }

    pub fn to_monfg(&self) -> Result<Monfg> {
        if self.payoffs.len() != self.n_players || self.action_counts.len() != self.n_players {
            return Err(Error::Format(format!(
                "n_players = {} but {} payoff tables and {} action counts",
                self.n_players,
                self.payoffs.len(),
                self.action_counts.len()
            )));
        }
        let tensors = self
            .payoffs
            .iter()
            .enumerate()
            .map(|(i, table)| {
                if let Some(bad) = table.iter().position(|v| v.len() != self.objective_count) {
                    return Err(Error::Format(format!(
                        "player {i}, profile {bad}: expected {} objectives",
                        self.objective_count
                    )));
                }
                PayoffTensor::new(self.action_counts.clone(), self.objective_count, table.concat())
            })
            .collect::<Result<Vec<_>>>()?;
        Monfg::new(tensors)
    }
}

pub fn monfg_to_toml(game: &Monfg) -> Result<String> {
    to_toml_document(MONFG_SCHEMA, &MonfgDocument::from_monfg(game))
}

pub fn monfg_from_toml(text: &str) -> Result<Monfg> {
    from_toml_document::<MonfgDocument>(MONFG_SCHEMA, text)?.to_monfg()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StrategySetDocument {
    Box { lower: Vec<f64>, upper: Vec<f64> },
    Simplex { vertices: usize },
}

impl From<&StrategySet> for StrategySetDocument {
    fn from(set: &StrategySet) -> Self {
        match set {
            StrategySet::Box(b) => StrategySetDocument::Box { lower: b.lower().to_vec(), upper: b.upper().to_vec() },
            StrategySet::Simplex { vertices } => StrategySetDocument::Simplex { vertices: *vertices },
        }
    }
}

/// A continuous game whose utilities are `v_i(s) = u_i(p_i(s))` over the
/// joint simplex strategies of an MONFG. Utilities are recorded by label;
/// `source` names the catalog game they come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousDocument {
    pub source: String,
    pub utilities: Vec<String>,
    pub strategy_sets: Vec<StrategySetDocument>,
    pub payoffs: MonfgDocument,
}

/// Final state of one player across the trials of a fictitious-play run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerSummary {
    pub player: usize,
    /// Mean and standard deviation of the last best response.
    pub mean_strategy: Vec<f64>,
    pub std_strategy: Vec<f64>,
    /// Mean of the player's own empirical action frequencies.
    pub mean_empirical: Vec<f64>,
    /// Continuous-game image of each trial's last best response.
    pub mean_mapped: Vec<f64>,
    pub std_mapped: Vec<f64>,
    /// Mean utility of the last best response against the empirical opponent.
    pub mean_utility: f64,
    /// Continuous-game utility at the joint mean mapped strategy.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utility_at_mean_mapped: Option<f64>,
}

/// The structured summary written next to the trajectory CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub game: String,
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub record_every: usize,
    pub best_response: crate::solvers::BestResponseConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bertrand: Option<crate::catalog::BertrandParams>,
    pub players: Vec<PlayerSummary>,
    /// ε-Nash check of the joint mean final best response.
    pub verification: crate::solvers::NeReport,
}

/// One row of the trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub trial: usize,
    pub iteration: usize,
    pub player: usize,
    pub strategy: Vec<f64>,
    pub empirical: Vec<f64>,
    /// Continuous-game image of `strategy`, empty without bijections.
    pub mapped: Vec<f64>,
    pub utility: f64,
}

/// Flattens trajectories into rows, mapping each best response back through
/// `bijections` when given.
pub fn trajectory_rows(
    trajectories: &[Trajectory],
    bijections: Option<&[StrategyBijection]>,
) -> Result<Vec<TrajectoryRow>> {
    let mut rows = Vec::new();
    for t in trajectories {
        for p in &t.points {
            for (player, s) in p.strategies.iter().enumerate() {
                let mapped = match bijections {
                    Some(b) => b[player].inverse(s.probs())?,
                    None => Vec::new(),
                };
                rows.push(TrajectoryRow {
                    trial: t.trial,
                    iteration: p.iteration,
                    player,
                    strategy: s.probs().to_vec(),
                    empirical: p.empirical[player].probs().to_vec(),
                    mapped,
                    utility: p.utilities[player],
                });
            }
        }
    }
    Ok(rows)
}

fn columns(rows: &[TrajectoryRow], f: impl Fn(&TrajectoryRow) -> usize) -> usize {
    rows.iter().map(f).max().unwrap_or(0)
}

fn push_padded(record: &mut Vec<String>, values: &[f64], width: usize) {
    record.extend(values.iter().map(f64::to_string));
    record.extend(std::iter::repeat_n(String::new(), width - values.len()));
}

/// Writes rows as CSV: `trial, iteration, player, strategy_*, empirical_*,
/// mapped_*, utility`. Players with fewer components leave trailing cells empty.
pub fn write_trajectory_csv<W: Write>(mut out: W, rows: &[TrajectoryRow]) -> Result<()> {
    out.write_all(header(TRAJECTORY_SCHEMA).as_bytes())?;
    let k = columns(rows, |r| r.strategy.len());
    let m = columns(rows, |r| r.mapped.len());
    let mut w = csv::Writer::from_writer(out);
    let mut names = vec!["trial".to_string(), "iteration".into(), "player".into()];
    names.extend((0..k).map(|j| format!("strategy_{j}")));
    names.extend((0..k).map(|j| format!("empirical_{j}")));
    names.extend((0..m).map(|j| format!("mapped_{j}")));
    names.push("utility".into());
    w.write_record(&names)?;
    for r in rows {
        let mut rec = vec![r.trial.to_string(), r.iteration.to_string(), r.player.to_string()];
        push_padded(&mut rec, &r.strategy, k);
        push_padded(&mut rec, &r.empirical, k);
        push_padded(&mut rec, &r.mapped, m);
        rec.push(r.utility.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

fn parse_cell<T: std::str::FromStr>(cell: &str, line: usize) -> Result<T> {
    cell.parse().map_err(|_| Error::Format(format!("line {line}: cannot parse '{cell}'")))
}

/// Reads the schema line and returns a CSV reader over the remaining text.
fn open_csv<R: Read>(input: R, schema: &str) -> Result<csv::Reader<BufReader<R>>> {
    let mut buf = BufReader::new(input);
    let mut first = String::new();
    buf.read_line(&mut first)?;
    strip_header(&first, schema)?;
    Ok(csv::Reader::from_reader(buf))
}

fn column_range(headers: &csv::StringRecord, prefix: &str) -> std::ops::Range<usize> {
    let idx: Vec<usize> = headers.iter().enumerate().filter(|(_, h)| h.starts_with(prefix)).map(|(i, _)| i).collect();
    match (idx.first(), idx.last()) {
        (Some(&a), Some(&b)) => a..b + 1,
        _ => 0..0,
    }
}

fn parse_vector(rec: &csv::StringRecord, cols: std::ops::Range<usize>, line: usize) -> Result<Vec<f64>> {
    cols.map(|i| &rec[i]).filter(|c| !c.is_empty()).map(|c| parse_cell(c, line)).collect()
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut reader = open_csv(input, TRAJECTORY_SCHEMA)?;
    let headers = reader.headers()?.clone();
    if headers.get(0) != Some("trial") || headers.iter().next_back() != Some("utility") {
        return Err(Error::Format("unexpected trajectory columns".into()));
    }
    let (s, e, m) =
        (column_range(&headers, "strategy_"), column_range(&headers, "empirical_"), column_range(&headers, "mapped_"));
    let mut rows = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = n + 3;
        rows.push(TrajectoryRow {
            trial: parse_cell(&rec[0], line)?,
            iteration: parse_cell(&rec[1], line)?,
            player: parse_cell(&rec[2], line)?,
            strategy: parse_vector(&rec, s.clone(), line)?,
            empirical: parse_vector(&rec, e.clone(), line)?,
            mapped: parse_vector(&rec, m.clone(), line)?,
            utility: parse_cell(&rec[rec.len() - 1], line)?,
        });
    }
    Ok(rows)
}

/// Mean and population standard deviation across trials of one player's
/// trajectory at one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationSummary {
    pub iteration: usize,
    pub player: usize,
    pub trials: usize,
    pub mean_strategy: Vec<f64>,
    pub std_strategy: Vec<f64>,
    pub mean_mapped: Vec<f64>,
    pub std_mapped: Vec<f64>,
    pub mean_utility: f64,
    pub std_utility: f64,
}

fn mean_std(samples: &[&[f64]], width: usize) -> (Vec<f64>, Vec<f64>) {
    let n = samples.len() as f64;
    let mut mean = vec![0.0; width];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(*s) {
            *m += v / n;
        }
    }
    let mut var = vec![0.0; width];
    for s in samples {
        for ((acc, v), m) in var.iter_mut().zip(*s).zip(&mean) {
            *acc += (v - m) * (v - m) / n;
        }
    }
    (mean, var.into_iter().map(f64::sqrt).collect())
}

/// Aggregates rows by (iteration, player), ordered by iteration then player.
pub fn summarize(rows: &[TrajectoryRow]) -> Vec<IterationSummary> {
    let mut groups: std::collections::BTreeMap<(usize, usize), Vec<&TrajectoryRow>> = Default::default();
    for r in rows {
        groups.entry((r.iteration, r.player)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((iteration, player), g)| {
            let strategies: Vec<&[f64]> = g.iter().map(|r| r.strategy.as_slice()).collect();
            let mapped: Vec<&[f64]> = g.iter().map(|r| r.mapped.as_slice()).collect();
            let utilities: Vec<[f64; 1]> = g.iter().map(|r| [r.utility]).collect();
            let utilities: Vec<&[f64]> = utilities.iter().map(|u| u.as_slice()).collect();
            let (mean_strategy, std_strategy) = mean_std(&strategies, g[0].strategy.len());
            let (mean_mapped, std_mapped) = mean_std(&mapped, g[0].mapped.len());
            let (mu, su) = mean_std(&utilities, 1);
            IterationSummary {
                iteration,
                player,
                trials: g.len(),
                mean_strategy,
                std_strategy,
                mean_mapped,
                std_mapped,
                mean_utility: mu[0],
                std_utility: su[0],
            }
        })
        .collect()
}

/// Writes per-iteration summaries as CSV with `mean_*`/`std_*` column pairs.
pub fn write_summary_csv<W: Write>(mut out: W, summary: &[IterationSummary]) -> Result<()> {
    out.write_all(header(ITERATION_SUMMARY_SCHEMA).as_bytes())?;
    let k = summary.iter().map(|s| s.mean_strategy.len()).max().unwrap_or(0);
    let m = summary.iter().map(|s| s.mean_mapped.len()).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut names = vec!["iteration".to_string(), "player".into(), "trials".into()];
    for (prefix, width) in [("strategy", k), ("mapped", m)] {
        names.extend((0..width).map(|j| format!("mean_{prefix}_{j}")));
        names.extend((0..width).map(|j| format!("std_{prefix}_{j}")));
    }
    names.extend(["mean_utility".into(), "std_utility".into()]);
    w.write_record(&names)?;
    for s in summary {
        let mut rec = vec![s.iteration.to_string(), s.player.to_string(), s.trials.to_string()];
        push_padded(&mut rec, &s.mean_strategy, k);
        push_padded(&mut rec, &s.std_strategy, k);
        push_padded(&mut rec, &s.mean_mapped, m);
        push_padded(&mut rec, &s.std_mapped, m);
        rec.push(s.mean_utility.to_string());
        rec.push(s.std_utility.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(input: R) -> Result<Vec<IterationSummary>> {
    let mut reader = open_csv(input, ITERATION_SUMMARY_SCHEMA)?;
    let headers = reader.headers()?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Format(format!("missing column {name}")))
    };
    let (mu, su) = (col("mean_utility")?, col("std_utility")?);
    let ranges: Vec<_> = ["mean_strategy_", "std_strategy_", "mean_mapped_", "std_mapped_"]
        .iter()
        .map(|p| column_range(&headers, p))
        .collect();
    let mut out = Vec::new();
    for (n, rec) in reader.records().enumerate() {
        let rec = rec?;
        let line = n + 3;
        out.push(IterationSummary {
            iteration: parse_cell(&rec[0], line)?,
            player: parse_cell(&rec[1], line)?,
            trials: parse_cell(&rec[2], line)?,
            mean_strategy: parse_vector(&rec, ranges[0].clone(), line)?,
            std_strategy: parse_vector(&rec, ranges[1].clone(), line)?,
            mean_mapped: parse_vector(&rec, ranges[2].clone(), line)?,
            std_mapped: parse_vector(&rec, ranges[3].clone(), line)?,
            mean_utility: parse_cell(&rec[mu], line)?,
            std_utility: parse_cell(&rec[su], line)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{example_game, ExampleGame};
    use crate::equivalence::PseCertificate;
    use crate::game::{identity_payoffs, MixedStrategy};
    use crate::solvers::TrajectoryPoint;

    #[test]
    fn monfg_round_trip() {
        for g in ExampleGame::ALL {
            let (mo, _) = example_game(g);
            let text = monfg_to_toml(&mo).unwrap();
            assert!(text.starts_with("# schema: psequiv-monfg/1\n"));
            assert_eq!(monfg_from_toml(&text).unwrap(), mo);
        }
        let awkward = PayoffTensor::new(vec![1, 2], 1, vec![0.1 + 0.2, -1e-300]).unwrap();
        let mo = Monfg::shared(awkward).unwrap();
        assert_eq!(monfg_from_toml(&monfg_to_toml(&mo).unwrap()).unwrap(), mo);
        let id = identity_payoffs(3, &[2, 3, 2]).unwrap();
        assert_eq!(monfg_from_toml(&monfg_to_toml(&id).unwrap()).unwrap(), id);
    }

    #[test]
    fn schema_header_is_checked() {
        let (mo, _) = example_game(ExampleGame::Balanced2x2);
        let text = monfg_to_toml(&mo).unwrap();
        let body = text.split_once('\n').unwrap().1;
        assert!(matches!(monfg_from_toml(body), Err(Error::Format(_))));
        let wrong = text.replace("psequiv-monfg/1", "psequiv-monfg/2");
        assert!(matches!(monfg_from_toml(&wrong), Err(Error::Format(_))));
    }

    #[test]
    fn malformed_monfg_is_rejected() {
        let text = "# schema: psequiv-monfg/1\nn_players = 2\naction_counts = [1, 1]\nobjective_count = 1\npayoffs = [[[1.0]]]\n";
        assert!(monfg_from_toml(text).is_err());
        let ragged = "# schema: psequiv-monfg/1\nn_players = 1\naction_counts = [2]\nobjective_count = 2\npayoffs = [[[1.0, 2.0], [3.0]]]\n";
        assert!(monfg_from_toml(ragged).is_err());
    }

    #[test]
    fn reports_round_trip() {
        let cert = PseCertificate {
            n_samples: 10,
            tolerance: 1e-8,
            seed: 3,
            max_utility_gap: 1.5e-16,
            per_player_gaps: vec![1.5e-16, 0.0],
            passed: true,
        };
        let text = to_toml_document(CERTIFICATE_SCHEMA, &cert).unwrap();
        assert_eq!(from_toml_document::<PseCertificate>(CERTIFICATE_SCHEMA, &text).unwrap(), cert);
        let doc = ContinuousDocument {
            source: "balanced-2x2".into(),
            utilities: vec!["x^2+y^2".into(); 2],
            strategy_sets: vec![
                StrategySetDocument::Simplex { vertices: 2 },
                StrategySetDocument::Box { lower: vec![0.0], upper: vec![1.0] },
            ],
            payoffs: MonfgDocument::from_monfg(&example_game(ExampleGame::Balanced2x2).0),
        };
        let text = to_toml_document(CONTINUOUS_SCHEMA, &doc).unwrap();
        assert_eq!(from_toml_document::<ContinuousDocument>(CONTINUOUS_SCHEMA, &text).unwrap(), doc);
    }

    fn ms(p: &[f64]) -> MixedStrategy {
        MixedStrategy::new(p.to_vec()).unwrap()
    }

    fn sample_trajectories() -> Vec<Trajectory> {
        (0..3)
            .map(|trial| Trajectory {
                trial,
                stream: trial as u64,
                points: (1..=2)
                    .map(|iteration| {
                        let q = 0.1 * (trial + iteration) as f64;
                        TrajectoryPoint {
                            iteration,
                            strategies: vec![ms(&[q, 1.0 - q]), ms(&[1.0 - q, q])],
                            empirical: vec![ms(&[0.5, 0.5]), ms(&[1.0, 0.0])],
                            utilities: vec![q, -q],
                        }
                    })
                    .collect(),
            })
            .collect()
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let bij = vec![StrategyBijection::interval(-1.0, 1.0).unwrap(); 2];
        let rows = trajectory_rows(&sample_trajectories(), Some(&bij)).unwrap();
        assert_eq!(rows.len(), 12);
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# schema: psequiv-trajectory/1"));
        assert_eq!(
            lines.next(),
            Some("trial,iteration,player,strategy_0,strategy_1,empirical_0,empirical_1,mapped_0,utility")
        );
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), rows);
        let plain = trajectory_rows(&sample_trajectories(), None).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&mut buf, &plain).unwrap();
        assert_eq!(read_trajectory_csv(buf.as_slice()).unwrap(), plain);
    }

    #[test]
    fn summary_statistics() {
        let bij = vec![StrategyBijection::interval(-1.0, 1.0).unwrap(); 2];
        let rows = trajectory_rows(&sample_trajectories(), Some(&bij)).unwrap();
        let summary = summarize(&rows);
        assert_eq!(summary.len(), 4);
        let s = &summary[0];
        assert_eq!((s.iteration, s.player, s.trials), (1, 0, 3));
        // q takes 0.1, 0.2, 0.3 across trials at iteration 1.
        approx::assert_abs_diff_eq!(s.mean_strategy[0], 0.2, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(s.std_strategy[0], (0.02f64 / 3.0).sqrt(), epsilon = 1e-12);
        approx::assert_abs_diff_eq!(s.mean_mapped[0], -1.0 + 2.0 * 0.2, epsilon = 1e-12);
        approx::assert_abs_diff_eq!(s.mean_utility, 0.2, epsilon = 1e-12);
        let mut buf = Vec::new();
        write_summary_csv(&mut buf, &summary).unwrap();
        assert_eq!(read_summary_csv(buf.as_slice()).unwrap(), summary);
    }
}
