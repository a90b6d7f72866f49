//! Field file I/O: a self-describing little-endian binary format and CSV.
//!
//! Binary layout ("SWF1"): magic, u32 ndim, u32 dims[2], f64 spacing[2],
//! f64 origin[2], reserved padding to a 64-byte header, then interleaved
//! (re, im) f64 pairs in row-major order. Binary round trips are bit exact.
//! CSV uses 17 significant digits so text round trips reproduce every f64.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SampledField;
use crate::grid::{Grid, Grid1D, Grid2D};

const MAGIC: &[u8; 4] = b"SWF1";
const HEADER_LEN: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldFormat {
    Csv,
    Binary,
}

pub fn write_field(path: &Path, field: &SampledField, format: FieldFormat) -> Result<()> {
    match format {
        FieldFormat::Binary => write_binary(path, field),
        FieldFormat::Csv => write_csv(path, field),
    }
}

pub fn read_field(path: &Path, format: FieldFormat) -> Result<SampledField> {
    match format {
        FieldFormat::Binary => read_binary(path),
        FieldFormat::Csv => read_csv(path),
    }
}

fn write_binary(path: &Path, field: &SampledField) -> Result<()> {
    let p = path.display().to_string();
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(&p, e))?);
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    let (ndim, dims, spacing, origin) = match &field.grid {
        Grid::One(g) => (1u32, [g.n_samples as u32, 1], [g.spacing, 0.0], [g.origin, 0.0]),
        Grid::Two(g) => (
            2u32,
            [g.nx as u32, g.ny as u32],
            [g.dx, g.dy],
            [g.origin_x, g.origin_y],
        ),
    };
    header[4..8].copy_from_slice(&ndim.to_le_bytes());
    header[8..12].copy_from_slice(&dims[0].to_le_bytes());
    header[12..16].copy_from_slice(&dims[1].to_le_bytes());
    header[16..24].copy_from_slice(&spacing[0].to_le_bytes());
    header[24..32].copy_from_slice(&spacing[1].to_le_bytes());
    header[32..40].copy_from_slice(&origin[0].to_le_bytes());
    header[40..48].copy_from_slice(&origin[1].to_le_bytes());
    w.write_all(&header).map_err(|e| Error::io(&p, e))?;
    for v in &field.values {
        w.write_all(&v.re.to_le_bytes()).map_err(|e| Error::io(&p, e))?;
        w.write_all(&v.im.to_le_bytes()).map_err(|e| Error::io(&p, e))?;
    }
    w.flush().map_err(|e| Error::io(&p, e))
}

fn read_binary(path: &Path) -> Result<SampledField> {
    let p = path.display().to_string();
    let mut r = BufReader::new(File::open(path).map_err(|e| Error::io(&p, e))?);
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::parse(format!("{p}:offset 0"), "truncated header"))?;
    if &header[0..4] != MAGIC {
        return Err(Error::parse(
            format!("{p}:offset 0"),
            "bad magic, expected SWF1",
        ));
    }
    let ndim = u32::from_le_bytes(header[4..8].try_into().unwrap());
    let d0 = u32::from_le_bytes(header[8..12].try_into().unwrap()) as usize;
    let d1 = u32::from_le_bytes(header[12..16].try_into().unwrap()) as usize;
    let s0 = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let s1 = f64::from_le_bytes(header[24..32].try_into().unwrap());
    let o0 = f64::from_le_bytes(header[32..40].try_into().unwrap());
    let o1 = f64::from_le_bytes(header[40..48].try_into().unwrap());
    let grid: Grid = match ndim {
        1 => Grid1D::new(d0, s0, o0)?.into(),
        2 => Grid2D::new(d0, d1, s0, s1, o0, o1)?.into(),
        n => {
            return Err(Error::parse(
                format!("{p}:offset 4"),
                format!("unsupported ndim {n}"),
            ))
        }
    };
    let n = grid.n_samples();
    let mut payload = vec![0u8; n * 16];
    r.read_exact(&mut payload).map_err(|_| {
        Error::parse(
            format!("{p}:offset {HEADER_LEN}"),
            format!("expected {} payload bytes", n * 16),
        )
    })?;
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        let re = f64::from_le_bytes(payload[i * 16..i * 16 + 8].try_into().unwrap());
        let im = f64::from_le_bytes(payload[i * 16 + 8..i * 16 + 16].try_into().unwrap());
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::parse(
                format!("{p}:offset {}", HEADER_LEN + i * 16),
                "non-finite sample",
            ));
        }
        values.push(Complex64::new(re, im));
    }
    SampledField::new(grid, values)
}

fn fmt17(x: f64) -> String {
    // 17 significant digits round-trips any f64.
    format!("{x:.16e}")
}

fn write_csv(path: &Path, field: &SampledField) -> Result<()> {
    let p = path.display().to_string();
    let mut w = BufWriter::new(File::create(path).map_err(|e| Error::io(&p, e))?);
    let res: std::io::Result<()> = (|| {
        match &field.grid {
            Grid::One(g) => {
                writeln!(w, "x,re,im")?;
                for (i, v) in field.values.iter().enumerate() {
                    writeln!(w, "{},{},{}", fmt17(g.coordinate(i)), fmt17(v.re), fmt17(v.im))?;
                }
            }
            Grid::Two(g) => {
                writeln!(w, "x,y,re,im")?;
                for iy in 0..g.ny {
                    for ix in 0..g.nx {
                        let v = field.values[g.index(ix, iy)];
                        writeln!(
                            w,
                            "{},{},{},{}",
                            fmt17(g.x(ix)),
                            fmt17(g.y(iy)),
                            fmt17(v.re),
                            fmt17(v.im)
                        )?;
                    }
                }
            }
        }
        w.flush()
    })();
    res.map_err(|e| Error::io(&p, e))
}

fn read_csv(path: &Path) -> Result<SampledField> {
    let p = path.display().to_string();
    let r = BufReader::new(File::open(path).map_err(|e| Error::io(&p, e))?);
    let mut lines = r.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(format!("{p}:1"), "empty file"))?;
    let header = header.map_err(|e| Error::io(&p, e))?;
    let cols: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let ndim = match cols.as_slice() {
        ["x", "re", "im"] => 1,
        ["x", "y", "re", "im"] => 2,
        _ => {
            for required in ["x", "re", "im"] {
                if !cols.contains(&required) {
                    return Err(Error::parse(
                        format!("{p}:1"),
                        format!("missing column '{required}'"),
                    ));
                }
            }
            return Err(Error::parse(
                format!("{p}:1"),
                format!("unexpected columns {cols:?}; expected x[,y],re,im"),
            ));
        }
    };

    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    let mut values: Vec<Complex64> = Vec::new();
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::io(&p, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let loc = format!("{p}:{}", lineno + 1);
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != ndim + 2 {
            return Err(Error::parse(
                loc,
                format!("expected {} columns, found {}", ndim + 2, fields.len()),
            ));
        }
        let mut parsed = Vec::with_capacity(fields.len());
        for f in &fields {
            let v: f64 = f
                .trim()
                .parse()
                .map_err(|_| Error::parse(&loc, format!("bad number '{f}'")))?;
            if !v.is_finite() {
                return Err(Error::parse(&loc, "non-finite entry"));
            }
            parsed.push(v);
        }
        xs.push(parsed[0]);
        if ndim == 2 {
            ys.push(parsed[1]);
        }
        values.push(Complex64::new(parsed[ndim], parsed[ndim + 1]));
    }
    if values.len() < 2 {
        return Err(Error::parse(format!("{p}:end"), "fewer than 2 samples"));
    }

    if ndim == 1 {
        let spacing = xs[1] - xs[0];
        let grid = Grid1D::new(xs.len(), spacing, xs[0])?;
        SampledField::new(grid, values)
    } else {
        // Row-major scan: x varies fastest, so the first row shares one y.
        let nx = ys.iter().take_while(|&&y| y == ys[0]).count();
        if nx == 0 || values.len() % nx != 0 {
            return Err(Error::parse(
                format!("{p}:end"),
                format!("row length {nx} does not divide sample count {}", values.len()),
            ));
        }
        let ny = values.len() / nx;
        if nx < 2 || ny < 2 {
            return Err(Error::parse(format!("{p}:end"), "2D grid needs nx, ny >= 2"));
        }
        let dx = xs[1] - xs[0];
        let dy = ys[nx] - ys[0];
        let grid = Grid2D::new(nx, ny, dx, dy, xs[0], ys[0])?;
        SampledField::new(grid, values)
    }
}
