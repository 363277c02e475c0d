//! Per-episode CSV.
//!
//! The first line is the format tag `# finder-episodes v1`; the header is
//! `seed,policy,S,p,l,steps,found_steps,fail_reason`. `found_steps` lists the
//! step each target slot was found at, `;`-joined, with `-` for targets not
//! found. `fail_reason` is empty for successful episodes.

use std::path::Path;

use finder_core::planner::{FailReason, Variant};

use crate::error::BenchError;
use crate::metrics::EpisodeResult;

pub const CSV_TAG: &str = "# finder-episodes v1";
pub const CSV_HEADER: [&str; 8] = ["seed", "policy", "S", "p", "l", "steps", "found_steps", "fail_reason"];

fn csv_err(e: impl std::fmt::Display) -> BenchError {
    BenchError::Csv(e.to_string())
}

pub fn write_csv(results: &[EpisodeResult]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in results {
        let found: Vec<String> = r
            .found_steps
            .iter()
            .map(|s| s.map_or_else(|| "-".to_string(), |v| v.to_string()))
            .collect();
        w.write_record([
            r.seed.to_string(),
            r.policy.name().to_string(),
            u8::from(r.success).to_string(),
            r.path_length.to_string(),
            r.optimal_length.to_string(),
            r.steps.to_string(),
            found.join(";"),
            r.fail_reason.map_or("", |f| f.name()).to_string(),
        ])
        .map_err(csv_err)?;
    }
    let body = w.into_inner().map_err(csv_err)?;
    Ok(format!("{CSV_TAG}\n{}", String::from_utf8(body).map_err(csv_err)?))
}

pub fn parse_csv(text: &str) -> Result<Vec<EpisodeResult>, BenchError> {
    let mut lines = text.splitn(2, '\n');
    if lines.next().map(str::trim_end) != Some(CSV_TAG) {
        return Err(BenchError::Csv(format!("missing `{CSV_TAG}` line")));
    }
    let rest = lines.next().unwrap_or("");
    let mut rdr = csv::Reader::from_reader(rest.as_bytes());
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(BenchError::Csv(format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(","))));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 1;
        let bad = |what: &str| BenchError::Csv(format!("row {row}: bad {what}"));
        let num = |idx: usize, what: &str| rec[idx].parse::<u32>().map_err(|_| bad(what));
        let found_steps = if rec[6].is_empty() {
            Vec::new()
        } else {
            rec[6]
                .split(';')
                .map(|s| if s == "-" { Ok(None) } else { s.parse().map(Some).map_err(|_| bad("found_steps")) })
                .collect::<Result<_, _>>()?
        };
        out.push(EpisodeResult {
            seed: rec[0].parse().map_err(|_| bad("seed"))?,
            policy: rec[1].parse::<Variant>().map_err(|_| bad("policy"))?,
            success: match &rec[2] {
                "1" => true,
                "0" => false,
                _ => return Err(bad("S")),
            },
            path_length: num(3, "p")?,
            optimal_length: num(4, "l")?,
            steps: num(5, "steps")?,
            found_steps,
            fail_reason: match &rec[7] {
                "" => None,
                "budget" => Some(FailReason::Budget),
                "exhausted" => Some(FailReason::Exhausted),
                _ => return Err(bad("fail_reason")),
            },
        });
    }
    Ok(out)
}

pub fn save_csv(results: &[EpisodeResult], path: impl AsRef<Path>) -> Result<(), BenchError> {
    let path = path.as_ref();
    std::fs::write(path, write_csv(results)?).map_err(|e| BenchError::io(path, e))
}

pub fn load_csv(path: impl AsRef<Path>) -> Result<Vec<EpisodeResult>, BenchError> {
    let path = path.as_ref();
    parse_csv(&std::fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?)
}
