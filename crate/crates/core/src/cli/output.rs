use std::io::Write;

use anyhow::Result;
use serde::Serialize;

use super::config::OutputFormat;

/// A flat, serde-serializable output row with a fixed column list.
pub trait Row: Serialize {
    const COLUMNS: &'static [&'static str];
}

#[derive(Serialize)]
struct Document<'a, T> {
    command: &'a str,
    columns: &'a [&'a str],
    rows: &'a [T],
    notes: &'a [String],
}

/// Writes rows in the chosen format. CSV notes become leading `#` lines.
pub fn emit<T: Row, W: Write>(
    out: &mut W,
    format: OutputFormat,
    command: &str,
    rows: &[T],
    notes: &[String],
) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = Document {
                command,
                columns: T::COLUMNS,
                rows,
                notes,
            };
            serde_json::to_writer_pretty(&mut *out, &doc)?;
            writeln!(out)?;
        }
        OutputFormat::Csv => {
            for n in notes {
                writeln!(out, "# {n}")?;
            }
            let mut wtr = csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(&mut *out);
            wtr.write_record(T::COLUMNS)?;
            for r in rows {
                wtr.serialize(r)?;
            }
            wtr.flush()?;
        }
        OutputFormat::Table => write_table(out, rows, notes)?,
    }
    Ok(())
}

fn cells<T: Serialize>(row: &T) -> Result<Vec<String>> {
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    wtr.serialize(row)?;
    let bytes = wtr.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(bytes.as_slice());
    let record = rdr.records().next().transpose()?.unwrap_or_default();
    Ok(record.iter().map(str::to_string).collect())
}

fn write_table<T: Row, W: Write>(out: &mut W, rows: &[T], notes: &[String]) -> Result<()> {
    let mut grid: Vec<Vec<String>> = vec![T::COLUMNS.iter().map(|c| c.to_string()).collect()];
    for r in rows {
        grid.push(cells(r)?);
    }
    let ncol = T::COLUMNS.len();
    let widths: Vec<usize> = (0..ncol)
        .map(|c| {
            grid.iter()
                .map(|row| row.get(c).map_or(0, |s| s.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    for (i, row) in grid.iter().enumerate() {
        let line: Vec<String> = (0..ncol)
            .map(|c| {
                let s = row.get(c).map_or("", String::as_str);
                let s = if s.is_empty() && i > 0 { "-" } else { s };
                format!("{s:>w$}", w = widths[c])
            })
            .collect();
        writeln!(out, "{}", line.join("  ").trim_end())?;
    }
    if rows.is_empty() {
        writeln!(out, "(no rows)")?;
    }
    for n in notes {
        writeln!(out, "note: {n}")?;
    }
    Ok(())
}
