//! Binary PGM (P5, maxval 255) and CSV matrix files.

use std::fs;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::features::ImageMatrix;

/// Parses a binary P5 greymap. Only maxval 255 is accepted.
pub fn parse_pgm(bytes: &[u8], path: &Path) -> Result<ImageMatrix> {
    let mut pos = 0;
    let token = |pos: &mut usize| -> Option<String> {
        loop {
            while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
                *pos += 1;
            }
            if *pos < bytes.len() && bytes[*pos] == b'#' {
                while *pos < bytes.len() && bytes[*pos] != b'\n' {
                    *pos += 1;
                }
                continue;
            }
            break;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
    };
    let magic = token(&mut pos).ok_or_else(|| Error::format(path, "empty file"))?;
    if magic != "P5" {
        return Err(Error::format(path, format!("expected binary PGM magic P5, found {magic:?}")));
    }
    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
        let t = token(&mut pos).ok_or_else(|| Error::format(path, format!("missing {name}")))?;
        *slot = t
            .parse()
            .map_err(|_| Error::format(path, format!("bad {name} {t:?}")))?;
    }
    let [width, height, maxval] = header;
    if maxval != 255 {
        return Err(Error::format(path, format!("maxval {maxval} unsupported, only 255")));
    }
    if width == 0 || height == 0 {
        return Err(Error::format(path, format!("degenerate size {width}x{height}")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(Error::format(path, "missing raster"));
    }
    pos += 1;
    let needed = width * height;
    let raster = &bytes[pos..];
    if raster.len() < needed {
        return Err(Error::format(
            path,
            format!("truncated raster: {} of {needed} bytes", raster.len()),
        ));
    }
    ImageMatrix::new(height, width, raster[..needed].iter().map(|&b| b as f64).collect())
}

/// Pixel values rounded half-up to integers in `[0, 255]`.
pub fn quantize(v: f64) -> u8 {
    (v + 0.5).floor().clamp(0.0, 255.0) as u8
}

pub fn encode_pgm(img: &ImageMatrix) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|&v| quantize(v)));
    out
}

pub fn read_pgm(path: &Path) -> Result<ImageMatrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes, path)
}

pub fn write_pgm(path: &Path, img: &ImageMatrix) -> Result<()> {
    fs::write(path, encode_pgm(img)).map_err(|e| Error::io(path, e))
}

/// Reads a headerless CSV of reals. All rows must have the same length.
pub fn read_csv_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv_matrix(&text, path)
}

pub fn parse_csv_matrix(text: &str, path: &Path) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let row = record
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::format(path, format!("row {}: bad value {f:?}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::format(
                    path,
                    format!("row {} has {} columns, expected {}", i + 1, row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(path, "no data"));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_row_iterator(r, c, rows.into_iter().flatten()))
}

pub fn write_csv_matrix(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| csv_io(path, e))?;
    for row in m.row_iter() {
        writer
            .write_record(row.iter().map(|v| format!("{v:?}")))
            .map_err(|e| csv_io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::format(path, format!("{other:?}")),
    }
}

/// CSV greymap: `h` rows of `w` values in `[0, 255]`.
pub fn read_csv_image(path: &Path) -> Result<ImageMatrix> {
    let m = read_csv_matrix(path)?;
    if let Some(v) = m.iter().find(|v| !(0.0..=255.0).contains(*v)) {
        return Err(Error::format(path, format!("pixel value {v} outside [0, 255]")));
    }
    ImageMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

pub fn write_csv_image(path: &Path, img: &ImageMatrix) -> Result<()> {
    let m = DMatrix::from_row_slice(img.height(), img.width(), img.pixels()).map(|v| quantize(v) as f64);
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(|e| csv_io(path, e))?;
    for row in m.row_iter() {
        writer
            .write_record(row.iter().map(|v| format!("{}", *v as u8)))
            .map_err(|e| csv_io(path, e))?;
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

/// Image file types recognised by extension (case-insensitive).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pgm,
    Csv,
}

impl ImageFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pgm" => Some(ImageFormat::Pgm),
            "csv" => Some(ImageFormat::Csv),
            _ => None,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Pgm => "pgm",
            ImageFormat::Csv => "csv",
        }
    }
}

pub fn read_image(path: &Path) -> Result<ImageMatrix> {
    match ImageFormat::from_path(path) {
        Some(ImageFormat::Pgm) => read_pgm(path),
        Some(ImageFormat::Csv) => read_csv_image(path),
        None => Err(Error::format(path, "unknown image extension (expected .pgm or .csv)")),
    }
}

pub fn write_image(path: &Path, img: &ImageMatrix) -> Result<()> {
    match ImageFormat::from_path(path) {
        Some(ImageFormat::Pgm) => write_pgm(path, img),
        Some(ImageFormat::Csv) => write_csv_image(path, img),
        None => Err(Error::format(path, "unknown image extension (expected .pgm or .csv)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> &Path {
        Path::new(s)
    }

    #[test]
    fn pgm_round_trip_with_comment() {
        let mut bytes = b"P5\n# made by hand\n3 2\n255\n".to_vec();
        bytes.extend([0u8, 10, 20, 30, 40, 255]);
        let img = parse_pgm(&bytes, p("x.pgm")).unwrap();
        assert_eq!(img.dims(), (2, 3));
        assert_eq!(img.get(1, 2), 255.0);
        assert_eq!(parse_pgm(&encode_pgm(&img), p("y.pgm")).unwrap(), img);
    }

    #[test]
    fn pgm_rejections() {
        let bad_max = b"P5 2 2 65535\n\0\0\0\0\0\0\0\0";
        assert!(matches!(parse_pgm(bad_max, p("a")), Err(Error::Format { .. })));
        assert!(parse_pgm(b"P2 1 1 255\n0", p("a")).is_err());
        assert!(parse_pgm(b"P5 2 2 255\n\0\0", p("a")).is_err());
        assert!(parse_pgm(b"", p("a")).is_err());
    }

    #[test]
    fn csv_parsing() {
        let m = parse_csv_matrix("1, 2.5,3\n4,5,6\n\n", p("m.csv")).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 3, &[1.0, 2.5, 3.0, 4.0, 5.0, 6.0]));
        assert!(parse_csv_matrix("1,2\n3\n", p("m.csv")).is_err());
        assert!(parse_csv_matrix("1,x\n", p("m.csv")).is_err());
        assert!(parse_csv_matrix("", p("m.csv")).is_err());
    }

    #[test]
    fn quantization_rounds_half_up() {
        assert_eq!(quantize(2.5), 3);
        assert_eq!(quantize(2.49), 2);
        assert_eq!(quantize(300.0), 255);
    }
}
