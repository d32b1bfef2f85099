//! Versioned CSV and JSON output.
//!
//! Every CSV starts with a `# schema=v1` line followed by a header row.
//! Huge counts travel as decimal strings, never as floats.

use std::io::{BufRead, Read, Write};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::attack::KpaExperimentRecord;
use crate::ssp::SolutionSet;
use crate::{Error, LogCount, RationalPolynomial, Result};

pub const SCHEMA_LINE: &str = "# schema=v1";

/// Writes the schema line, a header and one row per item.
pub fn write_csv<W: Write, T: Serialize>(
    mut out: W,
    rows: impl IntoIterator<Item = T>,
) -> Result<()> {
    writeln!(out, "{SCHEMA_LINE}")?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a file written by [`write_csv`], rejecting other schemas.
pub fn read_csv<R: Read, T: DeserializeOwned>(input: R) -> Result<Vec<T>> {
    let mut input = std::io::BufReader::new(input);
    let mut first = String::new();
    input.read_line(&mut first)?;
    if first.trim_end() != SCHEMA_LINE {
        return Err(Error::Schema(format!(
            "expected `{SCHEMA_LINE}`, found `{}`",
            first.trim_end()
        )));
    }
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(|e| Error::Schema(e.to_string())))
        .collect()
}

/// One enumerated solution as a bit string, with its distance to the truth.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub bits: String,
    pub hamming: Option<u32>,
}

pub fn solution_rows(set: &SolutionSet, reference: Option<u64>) -> Vec<SolutionRow> {
    set.members
        .iter()
        .map(|&m| SolutionRow {
            bits: (0..set.n)
                .map(|l| if m >> l & 1 == 1 { '1' } else { '0' })
                .collect(),
            hamming: reference.map(|r| (m ^ r).count_ones()),
        })
        .collect()
}

/// Coefficient of `L^j` in the polynomial for `h`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub h: usize,
    pub j: usize,
    pub numerator: String,
    pub denominator: String,
}

pub fn table_rows(h: usize, poly: &RationalPolynomial) -> Vec<TableRow> {
    poly.table_rows()
        .into_iter()
        .map(|(j, num, den)| TableRow {
            h,
            j,
            numerator: num.to_string(),
            denominator: den.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KpaRow {
    pub candidate_id: usize,
    pub rsnr1_db: f64,
    pub rsnr2_db: f64,
    pub draws_total: u64,
}

impl From<&KpaExperimentRecord> for KpaRow {
    fn from(r: &KpaExperimentRecord) -> Self {
        KpaRow {
            candidate_id: r.candidate_id,
            rsnr1_db: r.rsnr1_db,
            rsnr2_db: r.rsnr2_db,
            draws_total: r.draws_total,
        }
    }
}

/// A count in the three forms the CLI reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub log2_count: f64,
    pub log10_count: f64,
    pub decimal_string: String,
}

impl From<LogCount> for CountReport {
    fn from(c: LogCount) -> Self {
        CountReport {
            log2_count: c.log2(),
            log10_count: c.log10(),
            decimal_string: c.to_scientific(2),
        }
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::CountPoint;
    use crate::recovery::EtaPoint;
    use crate::ssp::{enumerate_solutions, SspInstance};

    #[test]
    fn round_trip_and_header() {
        let rows = vec![
            KpaRow {
                candidate_id: 0,
                rsnr1_db: 40.5,
                rsnr2_db: -1.25,
                draws_total: 7,
            },
            KpaRow {
                candidate_id: 1,
                rsnr1_db: 41.0,
                rsnr2_db: 0.5,
                draws_total: 9,
            },
        ];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# schema=v1\ncandidate_id,rsnr1_db,rsnr2_db,draws_total\n"));
        let back: Vec<KpaRow> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn missing_schema_or_column_is_rejected() {
        let r: Result<Vec<KpaRow>> = read_csv(&b"candidate_id,rsnr1_db\n1,2\n"[..]);
        assert!(matches!(r, Err(Error::Schema(_))));
        let r: Result<Vec<KpaRow>> = read_csv(&b"# schema=v1\ncandidate_id,rsnr1_db\n1,2\n"[..]);
        assert!(matches!(r, Err(Error::Schema(_))));
    }

    #[test]
    fn eta_and_count_headers() {
        let mut buf = Vec::new();
        write_csv(
            &mut buf,
            [EtaPoint {
                eta: 0.1,
                mean_rsnr_db: 3.0,
                std_db: 1.0,
                n_seeds: 4,
            }],
        )
        .unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .contains("eta,mean_rsnr_db,std_db,n_seeds\n"));
        let pts = crate::experiments::eve_count_sweep(&[12], 10, 2, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &pts).unwrap();
        let back: Vec<CountPoint> = read_csv(&buf[..]).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].h, None);
    }

    #[test]
    fn solutions_as_bit_strings() {
        let inst = SspInstance::new(vec![1, 1, 2], 2).unwrap();
        let set = enumerate_solutions(&inst, 10).unwrap();
        let rows = solution_rows(&set, Some(0b011));
        let bits: Vec<&str> = rows.iter().map(|r| r.bits.as_str()).collect();
        assert_eq!(bits, ["110", "001"]);
        assert_eq!(rows[0].hamming, Some(0));
        assert_eq!(rows[1].hamming, Some(3));
    }

    #[test]
    fn table_for_h2() {
        let rows = table_rows(2, &crate::ehrhart::fit_ph_polynomial(2).unwrap());
        assert_eq!(
            rows,
            vec![TableRow {
                h: 2,
                j: 1,
                numerator: "2".into(),
                denominator: "1".into()
            }]
        );
    }

    #[test]
    fn count_report() {
        let r = CountReport::from(crate::predictor::s_eve_expected(4096, 128));
        assert_eq!(r.decimal_string, "1.25e1229");
        assert!((r.log10_count - 1229.097).abs() < 1e-2);
    }
}
