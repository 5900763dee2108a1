//! CSV readers and writers for datasets and label vectors.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::model::Label;
use crate::point::Point;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `x,y,z`; labels may be omitted, leaving `z` empty.
pub fn write_dataset<W: Write>(out: W, points: &[Point], labels: Option<&[Label]>) -> Result<()> {
    if let Some(z) = labels {
        if z.len() != points.len() {
            return Err(Error::LengthMismatch(z.len(), points.len()));
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "y", "z"])?;
    for (i, p) in points.iter().enumerate() {
        let z = labels.map(|z| z[i].to_string()).unwrap_or_default();
        w.write_record([fmt_f64(p.x), fmt_f64(p.y), z])?;
    }
    w.flush()?;
    Ok(())
}

/// Points and, when every row has a `z`, the labels.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTable {
    pub points: Vec<Point>,
    pub labels: Option<Vec<Label>>,
}

fn parse_f64(field: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("row {row}: bad number {field:?}")))
}

/// Reads a dataset CSV with header `x,y` or `x,y,z`.
pub fn read_dataset<R: Read>(input: R) -> Result<PointTable> {
    let mut r = csv::ReaderBuilder::new().flexible(true).from_reader(input);
    let header = r.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h.trim() == name);
    let (xi, yi) = match (col("x"), col("y")) {
        (Some(x), Some(y)) => (x, y),
        _ => return Err(Error::Parse("header must contain x and y".into())),
    };
    let zi = col("z");
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut all_labeled = zi.is_some();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).ok_or_else(|| Error::Parse(format!("row {row}: missing column")));
        points.push(Point::new(parse_f64(get(xi)?, row)?, parse_f64(get(yi)?, row)?));
        if let Some(zi) = zi {
            match rec.get(zi).map(str::trim) {
                Some("") | None => all_labeled = false,
                Some(s) => {
                    let value: Label = s.parse().map_err(|_| Error::Parse(format!("row {row}: bad label {s:?}")))?;
                    if value != 1 && value != 2 {
                        return Err(Error::BadLabel { index: row, value });
                    }
                    labels.push(value);
                }
            }
        }
    }
    Ok(PointTable {
        points,
        labels: all_labeled.then_some(labels),
    })
}

pub fn write_labels<W: Write>(out: W, labels: &[Label]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["index", "z_hat"])?;
    for (i, z) in labels.iter().enumerate() {
        w.write_record([i.to_string(), z.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `index,z_hat`; indices must run `0..N` in order.
pub fn read_labels<R: Read>(input: R) -> Result<Vec<Label>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let index: usize = rec
            .get(0)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("row {row}: bad index")))?;
        if index != row {
            return Err(Error::Parse(format!("row {row}: index {index} out of order")));
        }
        let value: Label = rec
            .get(1)
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("row {row}: bad label")))?;
        out.push(value);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trips_exactly() {
        let pts = vec![Point::new(0.1, -1.0 / 3.0), Point::new(1e-300, f64::MAX)];
        let z = vec![1, 2];
        let mut buf = Vec::new();
        write_dataset(&mut buf, &pts, Some(&z)).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x,y,z\n"));
        assert_eq!(text.lines().count(), 3);
        let back = read_dataset(&buf[..]).unwrap();
        assert_eq!(back.points, pts);
        assert_eq!(back.labels, Some(z));
    }

    #[test]
    fn unlabeled_dataset() {
        let back = read_dataset("x,y\n1,2\n3,4\n".as_bytes()).unwrap();
        assert_eq!(back.points.len(), 2);
        assert_eq!(back.labels, None);
        let back = read_dataset("x,y,z\n1,2,\n3,4,1\n".as_bytes()).unwrap();
        assert_eq!(back.labels, None);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_dataset("a,b\n1,2\n".as_bytes()).is_err());
        assert!(read_dataset("x,y\n1,zz\n".as_bytes()).is_err());
        assert!(matches!(read_dataset("x,y,z\n1,2,3\n".as_bytes()), Err(Error::BadLabel { .. })));
    }

    #[test]
    fn labels_round_trip() {
        let z = vec![2, 1, 1, 2];
        let mut buf = Vec::new();
        write_labels(&mut buf, &z).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("index,z_hat\n"));
        assert_eq!(read_labels(&buf[..]).unwrap(), z);
    }
}
