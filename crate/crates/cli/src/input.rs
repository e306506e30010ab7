use crate::error::{CliError, CliResult};
use ising_qec::analysis::FailurePoint;
use std::collections::BTreeMap;
use std::path::Path;

/// Contents of a data file, by schema.
#[derive(Debug, Clone)]
pub enum DataFile {
    /// Curve or shot rows as failure points.
    Failure(Vec<FailurePoint>),
    /// Gap rows: `(L, p bits) → {ΔE: count}`.
    Gap(BTreeMap<(usize, u64), BTreeMap<i64, u64>>),
}

fn schema(row: usize, msg: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("schema error at row {row}: {msg}"))
}

pub fn read_data(path: &Path) -> CliResult<DataFile> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let col = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| col(name).ok_or_else(|| schema(0, format!("missing column {name:?}")));
    let (li, pi) = (need("L")?, need("p")?);
    enum Kind {
        Curve(usize, Option<usize>),
        Shots(usize, usize),
        Gap(usize, usize),
    }
    let kind = if let (Some(d), Some(c)) = (col("delta_e"), col("count")) {
        Kind::Gap(d, c)
    } else if let (Some(ph), Some(n)) = (col("pfail_hat"), col("shots")) {
        Kind::Shots(ph, n)
    } else {
        Kind::Curve(need("pfail")?, col("stderr"))
    };
    let mut failure = Vec::new();
    let mut gap: BTreeMap<(usize, u64), BTreeMap<i64, u64>> = BTreeMap::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| schema(row, e))?;
        let field = |j: usize| rec.get(j).ok_or_else(|| schema(row, "too few fields"));
        let float = |j: usize| -> CliResult<f64> {
            let s = field(j)?;
            s.parse::<f64>().map_err(|_| schema(row, format!("{:?} is not a number in column {:?}", s, header[j])))
        };
        let int = |j: usize| -> CliResult<i64> {
            let s = field(j)?;
            s.parse::<i64>().map_err(|_| schema(row, format!("{:?} is not an integer in column {:?}", s, header[j])))
        };
        let l = int(li)?;
        if l < 1 {
            return Err(schema(row, format!("L = {l} must be positive")));
        }
        let (l, p) = (l as usize, float(pi)?);
        match kind {
            Kind::Curve(fi, si) => {
                let err = match si {
                    Some(s) => float(s)?,
                    None => 1.0,
                };
                failure.push(FailurePoint { l, p, pfail: float(fi)?, err });
            }
            Kind::Shots(phi, ni) => {
                let n = float(ni)?;
                let ph = float(phi)?;
                let err = (ph.max(0.5 / n) * (1.0 - ph).max(0.5 / n) / n).sqrt();
                failure.push(FailurePoint { l, p, pfail: ph, err });
            }
            Kind::Gap(di, ci) => {
                let c = int(ci)?;
                if c < 0 {
                    return Err(schema(row, "negative count"));
                }
                *gap.entry((l, p.to_bits())).or_default().entry(int(di)?).or_insert(0) += c as u64;
            }
        }
    }
    Ok(match kind {
        Kind::Gap(..) => DataFile::Gap(gap),
        _ => DataFile::Failure(failure),
    })
}
