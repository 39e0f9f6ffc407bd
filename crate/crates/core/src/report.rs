//! CSV artifacts: metric traces, collection dumps and replicate summaries.
//!
//! Reals are written with nine significant digits in plain decimal notation
//! so that runs can be compared with an ordinary text diff.

use crate::container::Container;
use crate::error::QdError;
use crate::metrics::{MetricsRow, Quartiles, SummaryRow};
use crate::types::IndividualId;

pub const MISSING: &str = "NA";
/// Cell column for containers without cells.
pub const NO_CELL: &str = "—";

const METRICS_HEADER: [&str; 6] = [
    "batch",
    "evals",
    "size",
    "max_quality",
    "total_quality",
    "total_novelty",
];

/// Formats `value` with nine significant digits and no exponent.
pub fn fmt_sig9(value: f64) -> String {
    if !value.is_finite() {
        return value.to_string();
    }
    if value == 0.0 {
        return "0.00000000".to_string();
    }
    // The exponent after rounding to nine digits (9.9999999996 becomes 1e1).
    let sci = format!("{value:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    let decimals = (8 - exp).max(0) as usize;
    format!("{value:.decimals$}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| MISSING.to_string(), fmt_sig9)
}

fn parse_err(what: &str, message: impl ToString) -> QdError {
    QdError::Parse {
        what: what.to_string(),
        message: message.to_string(),
    }
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("utf-8 csv")
}

fn reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().from_reader(text.as_bytes())
}

fn field<T: std::str::FromStr>(record: &csv::StringRecord, i: usize, what: &str) -> Result<T, QdError> {
    let raw = record.get(i).ok_or_else(|| parse_err(what, format!("missing column {i}")))?;
    raw.parse()
        .map_err(|_| parse_err(what, format!("cannot parse {raw:?} in column {i}")))
}

fn opt_field(record: &csv::StringRecord, i: usize, what: &str) -> Result<Option<f64>, QdError> {
    match record.get(i) {
        Some(MISSING) => Ok(None),
        _ => field(record, i, what).map(Some),
    }
}

pub fn metrics_csv(rows: &[MetricsRow]) -> String {
    let mut w = writer();
    w.write_record(METRICS_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            r.batch.to_string(),
            r.evals.to_string(),
            r.size.to_string(),
            fmt_opt(r.max_quality),
            fmt_sig9(r.total_quality),
            fmt_opt(r.total_novelty),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn parse_metrics_csv(text: &str) -> Result<Vec<MetricsRow>, QdError> {
    const WHAT: &str = "metrics.csv";
    let mut r = reader(text);
    let header = r.headers().map_err(|e| parse_err(WHAT, e))?;
    if header.iter().ne(METRICS_HEADER) {
        return Err(parse_err(WHAT, format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| parse_err(WHAT, e))?;
            Ok(MetricsRow {
                batch: field(&rec, 0, WHAT)?,
                evals: field(&rec, 1, WHAT)?,
                size: field(&rec, 2, WHAT)?,
                max_quality: opt_field(&rec, 3, WHAT)?,
                total_quality: field(&rec, 4, WHAT)?,
                total_novelty: opt_field(&rec, 5, WHAT)?,
            })
        })
        .collect()
}

/// One member as written to collection.csv.
#[derive(Debug, Clone, PartialEq)]
pub struct CollectionRow {
    pub id: IndividualId,
    pub cell: Option<String>,
    pub descriptor: Vec<f64>,
    pub fitness: f64,
    pub novelty: f64,
    pub local_quality: u32,
    pub curiosity: f64,
    pub genes: Vec<f64>,
}

pub fn collection_csv<C: Container + ?Sized>(container: &C) -> String {
    let members = container.members();
    let (dims, genes) = members
        .first()
        .map_or((0, 0), |m| (m.descriptor().dim(), m.genotype().len()));
    let mut header = vec!["id".to_string(), "cell".to_string()];
    header.extend((0..dims).map(|i| format!("desc_{i}")));
    header.extend(["fitness", "novelty", "local_quality", "curiosity"].map(String::from));
    header.extend((0..genes).map(|i| format!("gene_{i}")));

    let mut w = writer();
    w.write_record(&header).expect("in-memory write");
    for m in members {
        let mut row = vec![
            m.id().to_string(),
            container.cell_label(m).unwrap_or_else(|| NO_CELL.to_string()),
        ];
        row.extend(m.descriptor().coords().iter().map(|&c| fmt_sig9(c)));
        row.push(fmt_sig9(m.fitness()));
        row.push(fmt_sig9(m.novelty));
        row.push(m.local_quality.to_string());
        row.push(fmt_sig9(m.curiosity));
        row.extend(m.genotype().values().iter().map(|&g| fmt_sig9(g)));
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}

pub fn parse_collection_csv(text: &str) -> Result<Vec<CollectionRow>, QdError> {
    const WHAT: &str = "collection.csv";
    let mut r = reader(text);
    let header = r.headers().map_err(|e| parse_err(WHAT, e))?.clone();
    let dims = header.iter().filter(|h| h.starts_with("desc_")).count();
    let genes = header.iter().filter(|h| h.starts_with("gene_")).count();
    if header.len() != 6 + dims + genes || header.get(0) != Some("id") {
        return Err(parse_err(WHAT, format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(|e| parse_err(WHAT, e))?;
            let fit = 2 + dims;
            Ok(CollectionRow {
                id: field(&rec, 0, WHAT)?,
                cell: rec.get(1).filter(|c| *c != NO_CELL).map(String::from),
                descriptor: (2..fit).map(|i| field(&rec, i, WHAT)).collect::<Result<_, _>>()?,
                fitness: field(&rec, fit, WHAT)?,
                novelty: field(&rec, fit + 1, WHAT)?,
                local_quality: field(&rec, fit + 2, WHAT)?,
                curiosity: field(&rec, fit + 3, WHAT)?,
                genes: (fit + 4..fit + 4 + genes)
                    .map(|i| field(&rec, i, WHAT))
                    .collect::<Result<_, _>>()?,
            })
        })
        .collect()
}

/// Recomputes a metrics row from a collection dump alone.
pub fn metrics_from_collection(
    rows: &[CollectionRow],
    quality_offset: f64,
    reports_novelty: bool,
    batch: usize,
    evals: u64,
) -> MetricsRow {
    MetricsRow {
        batch,
        evals,
        size: rows.len(),
        max_quality: rows.iter().map(|r| r.fitness).reduce(f64::max),
        total_quality: rows.iter().map(|r| r.fitness + quality_offset).sum(),
        total_novelty: (reports_novelty && !rows.is_empty()).then(|| rows.iter().map(|r| r.novelty).sum()),
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut header = vec!["batch".to_string(), "evals".to_string()];
    for metric in &METRICS_HEADER[2..] {
        for stat in ["q1", "median", "q3"] {
            header.push(format!("{metric}_{stat}"));
        }
    }
    let mut w = writer();
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let mut row = vec![r.batch.to_string(), r.evals.to_string()];
        for q in [r.size, r.max_quality, r.total_quality, r.total_novelty] {
            match q {
                Some(Quartiles { q1, median, q3 }) => {
                    row.extend([q1, median, q3].map(fmt_sig9));
                }
                None => row.extend([MISSING; 3].map(String::from)),
            }
        }
        w.write_record(&row).expect("in-memory write");
    }
    finish(w)
}
