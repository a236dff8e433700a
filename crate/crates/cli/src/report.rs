//! Text and CSV renderings of the evaluation statistics.

use std::fmt::Write;

use clap::ValueEnum;
use touchboard_core::evalstats::{
    round_half_up, DiscoveryMatrix, MeanReport, ResampleStats, SurveyReport, TaskMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn means(m: &TaskMatrix, r: &MeanReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            for (i, (label, mean)) in m.tasks.iter().zip(&r.per_task).enumerate() {
                writeln!(
                    out,
                    "task {} mean {:.4} ({:.2})  {}",
                    i + 1,
                    mean,
                    round_half_up(*mean, 2),
                    label
                )
                .unwrap();
            }
            writeln!(
                out,
                "overall_mean {:.4} ({:.2})",
                r.overall,
                round_half_up(r.overall, 2)
            )
            .unwrap();
        }
        Format::Csv => {
            out.push_str("task,label,mean,mean_2dp\n");
            for (i, (label, mean)) in m.tasks.iter().zip(&r.per_task).enumerate() {
                writeln!(
                    out,
                    "{},{},{},{:.2}",
                    i + 1,
                    csv_field(label),
                    mean,
                    round_half_up(*mean, 2)
                )
                .unwrap();
            }
            writeln!(
                out,
                "overall,,{},{:.2}",
                r.overall,
                round_half_up(r.overall, 2)
            )
            .unwrap();
        }
    }
    out
}

pub fn survey(factor: &str, r: &SurveyReport, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            writeln!(out, "factor {factor} participants {}", r.participants).unwrap();
            writeln!(out, "item  no(f %)  partly(f %)  yes(f %)  mean  sd").unwrap();
            for (i, it) in r.items.iter().enumerate() {
                writeln!(
                    out,
                    "{}  {} {:.2}  {} {:.2}  {} {:.2}  {:.2}  {:.2}  {}",
                    i + 1,
                    it.freq[0],
                    it.pct[0],
                    it.freq[1],
                    it.pct[1],
                    it.freq[2],
                    it.pct[2],
                    round_half_up(it.mean, 2),
                    round_half_up(it.std_dev, 2),
                    it.label
                )
                .unwrap();
            }
            let o = &r.overall;
            writeln!(
                out,
                "overall  {:.2} {:.2}  {:.2} {:.2}  {:.2} {:.2}  {:.2}",
                o.freq[0],
                o.pct[0],
                o.freq[1],
                o.pct[1],
                o.freq[2],
                o.pct[2],
                round_half_up(o.mean, 2)
            )
            .unwrap();
            writeln!(
                out,
                "overall_mean {:.2} band {}",
                round_half_up(o.mean, 2),
                r.band
            )
            .unwrap();
        }
        Format::Csv => {
            out.push_str(
                "factor,item,label,f_no,pct_no,f_partly,pct_partly,f_yes,pct_yes,mean,sd,band\n",
            );
            for (i, it) in r.items.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},",
                    factor,
                    i + 1,
                    csv_field(&it.label),
                    it.freq[0],
                    it.pct[0],
                    it.freq[1],
                    it.pct[1],
                    it.freq[2],
                    it.pct[2],
                    it.mean,
                    it.std_dev
                )
                .unwrap();
            }
            let o = &r.overall;
            writeln!(
                out,
                "{factor},overall,,{},{},{},{},{},{},{},,{}",
                o.freq[0], o.pct[0], o.freq[1], o.pct[1], o.freq[2], o.pct[2], o.mean, r.band
            )
            .unwrap();
        }
    }
    out
}

pub fn resample(d: &DiscoveryMatrix, rows: &[ResampleStats], seed: u64, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Text => {
            writeln!(
                out,
                "users {} problems {} found_by_group {} seed {}",
                d.users(),
                d.problems(),
                d.found_by_group().len(),
                seed
            )
            .unwrap();
            writeln!(out, "k  trials  min%  mean%  std%").unwrap();
            for r in rows {
                writeln!(
                    out,
                    "{}  {}  {:.2}  {:.2}  {:.2}",
                    r.k, r.trials, r.min_pct, r.mean_pct, r.std_pct
                )
                .unwrap();
            }
        }
        Format::Csv => {
            out.push_str("k,trials,min_pct,mean_pct,std_pct\n");
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    r.k, r.trials, r.min_pct, r.mean_pct, r.std_pct
                )
                .unwrap();
            }
        }
    }
    out
}
