use std::fs::File;
use std::io::Read;
use std::path::Path;

use crate::engine::{validate_p, PValueRecord};
use crate::error::{Error, Result};

/// Which CSV columns hold which fields.
///
/// `p` must be present in the header. The optional columns are used when the
/// header contains them and ignored otherwise. When a `t` column is used its
/// values must run 1, 2, 3, ... in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnMap {
    pub p: String,
    pub label: Option<String>,
    pub batch: Option<String>,
    pub t: Option<String>,
}

impl Default for ColumnMap {
    fn default() -> Self {
        ColumnMap {
            p: "p".into(),
            label: Some("label".into()),
            batch: Some("batch".into()),
            t: Some("t".into()),
        }
    }
}

impl ColumnMap {
    pub fn with_p(p: impl Into<String>) -> Self {
        ColumnMap {
            p: p.into(),
            ..ColumnMap::default()
        }
    }
}

pub fn ingest_csv(path: &Path, columns: &ColumnMap) -> Result<Vec<PValueRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    ingest_csv_reader(file, columns)
}

/// Errors name the 1-based data row (the header is not counted).
pub fn ingest_csv_reader(reader: impl Read, columns: &ColumnMap) -> Result<Vec<PValueRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.is_empty() {
        return Err(Error::Input("CSV input has no header".into()));
    }
    let find = |name: &str| header.iter().position(|h| h == name);
    let p_col = find(&columns.p)
        .ok_or_else(|| Error::Input(format!("CSV header has no `{}` column", columns.p)))?;
    let label_col = columns.label.as_deref().and_then(find);
    let batch_col = columns.batch.as_deref().and_then(find);
    let t_col = columns.t.as_deref().and_then(find);

    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let n = i + 1;
        let bad = |message: String| Error::Row {
            row: n,
            message: format!("{message} (file line {})", n + 1),
        };
        let row = row.map_err(|e| bad(e.to_string()))?;
        let field = |c: usize| row.get(c).unwrap_or("");
        let raw = field(p_col);
        let p: f64 = raw
            .parse()
            .map_err(|_| bad(format!("p-value `{raw}` is not a decimal number")))?;
        validate_p(p).map_err(|e| bad(e.to_string()))?;
        if let Some(c) = t_col {
            let raw = field(c);
            let t: u64 = raw
                .parse()
                .map_err(|_| bad(format!("index `{raw}` is not a positive integer")))?;
            if t != n as u64 {
                return Err(bad(format!("index {t} out of sequence, expected {n}")));
            }
        }
        let label = label_col
            .map(|c| field(c).to_string())
            .filter(|s| !s.is_empty());
        let batch = match batch_col.map(field).filter(|s| !s.is_empty()) {
            None => None,
            Some(raw) => Some(
                raw.parse()
                    .map_err(|_| bad(format!("batch `{raw}` is not a non-negative integer")))?,
            ),
        };
        out.push(PValueRecord {
            t: n as u64,
            p,
            label,
            batch,
        });
    }
    Ok(out)
}
