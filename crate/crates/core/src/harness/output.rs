//! CSV emission and ingestion.

use std::io::{Read, Write};

use super::{HarnessError, RegretRecord, SummaryRow};

pub const TRACE_HEADER: [&str; 5] = ["algorithm", "replication", "t", "inst_regret", "cum_regret"];
pub const SUMMARY_HEADER: [&str; 4] = ["algorithm", "t", "mean_cum_regret", "se_cum_regret"];

/// C-style `%.{digits}g`.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_fraction(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn num(x: f64) -> String {
    format_significant(x, 10)
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

pub fn write_trace<'a, W: Write>(
    out: W,
    records: impl IntoIterator<Item = RegretRecord<'a>>,
) -> Result<(), HarnessError> {
    let mut w = writer(out);
    w.write_record(TRACE_HEADER)?;
    for r in records {
        w.write_record([
            r.algorithm,
            &r.replication.to_string(),
            &r.t.to_string(),
            &num(r.inst_regret),
            &num(r.cum_regret),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary<W: Write>(out: W, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    let mut w = writer(out);
    w.write_record(SUMMARY_HEADER)?;
    for r in rows {
        w.write_record([
            r.algorithm.as_str(),
            &r.t.to_string(),
            &num(r.mean_cum_regret),
            &num(r.se_cum_regret),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A trace row read back from disk.
#[derive(Debug, Clone, PartialEq, serde::Deserialize)]
pub struct OwnedRecord {
    pub algorithm: String,
    pub replication: u32,
    pub t: u64,
    pub inst_regret: f64,
    pub cum_regret: f64,
}

impl OwnedRecord {
    pub fn borrow(&self) -> RegretRecord<'_> {
        RegretRecord {
            algorithm: &self.algorithm,
            replication: self.replication,
            t: self.t,
            inst_regret: self.inst_regret,
            cum_regret: self.cum_regret,
        }
    }
}

pub fn read_trace<R: Read>(input: R) -> Result<Vec<OwnedRecord>, HarnessError> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(TRACE_HEADER) {
        return Err(HarnessError::Config(format!(
            "trace header must be {}, got {}",
            TRACE_HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize()
        .map(|r| r.map_err(HarnessError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (1.0, "1"),
            (0.1, "0.1"),
            (1.0 / 3.0, "0.3333333333"),
            (123456.789, "123456.789"),
            (1234567890.5, "1234567890"),
            (1234567890.6, "1234567891"),
            (12345678901.0, "1.23456789e+10"),
            (0.0001234, "0.0001234"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (1e-300, "1e-300"),
            (9.9999999999, "10"),
            (0.0, "0"),
        ];
        for (x, want) in cases {
            assert_eq!(format_significant(x, 10), want, "{x}");
        }
    }

    #[test]
    fn round_trip_and_lf_only() {
        let recs = [
            RegretRecord {
                algorithm: "A,B",
                replication: 0,
                t: 1,
                inst_regret: 0.25,
                cum_regret: 0.25,
            },
            RegretRecord {
                algorithm: "A,B",
                replication: 0,
                t: 2,
                inst_regret: 0.0,
                cum_regret: 0.25,
            },
        ];
        let mut buf = Vec::new();
        write_trace(&mut buf, recs.iter().copied()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(!text.contains('\r'));
        assert!(text.starts_with("algorithm,replication,t,inst_regret,cum_regret\n"));
        let back = read_trace(buf.as_slice()).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[0].borrow(), recs[0]);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(read_trace("a,b\n1,2\n".as_bytes()).is_err());
    }
}
