//! Element-wise constant diffusion coefficients.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::mesh::StructuredMesh;
use crate::{Error, Result};

/// One value per element, indexed by element id.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    n: usize,
    values: Vec<f64>,
}

impl CoefficientField {
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::InvalidParameter(format!(
                "{} coefficient values for {n}x{n} elements",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("coefficient {v} is not positive")));
        }
        Ok(Self { n, values })
    }

    pub fn n_elems_per_side(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, ex: usize, ey: usize) -> f64 {
        self.values[ey * self.n + ex]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Writes one element row per line, bottom row first.
    pub fn write_raster(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        for ey in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|ex| format!("{:e}", self.at(ex, ey))).collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Reads a whitespace-separated grid of reals, one row per line.
pub fn read_raster(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let reader = BufReader::new(File::open(path)?);
    let mut rows = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let row = t
            .split_whitespace()
            .map(|s| {
                s.parse::<f64>().map_err(|_| Error::Parse {
                    line: k + 1,
                    msg: format!("'{s}' is not a number"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// A short vertical channel crossing a horizontal subdomain edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShortChannel {
    /// Element column within the subdomain.
    pub offset: usize,
    /// Elements below the edge.
    pub below: usize,
    /// Elements above the edge.
    pub above: usize,
}

/// Per subdomain column: one long vertical channel plus short channels
/// cutting every interior horizontal edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelLayout {
    pub subdomains_per_side: usize,
    pub long_offset: usize,
    pub shorts: Vec<ShortChannel>,
    pub width: usize,
}

impl ChannelLayout {
    pub fn new(subdomains_per_side: usize) -> Self {
        Self {
            subdomains_per_side,
            long_offset: 5,
            shorts: vec![
                ShortChannel {
                    offset: 2,
                    below: 4,
                    above: 4,
                },
                ShortChannel {
                    offset: 7,
                    below: 3,
                    above: 3,
                },
            ],
            width: 1,
        }
    }
}

/// Per interior horizontal edge: three prongs crossing the edge, joined by
/// bars below it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombLayout {
    pub subdomains_per_side: usize,
    /// Element columns of the prongs within the subdomain.
    pub prongs: [usize; 3],
    /// Prong extent above the edge.
    pub above: usize,
    /// Depth of the bar joining the first two prongs; the middle prong ends here.
    pub near_bar: usize,
    /// Depth of the bar joining all three prongs.
    pub far_bar: usize,
    pub width: usize,
}

impl CombLayout {
    pub fn new(subdomains_per_side: usize) -> Self {
        Self {
            subdomains_per_side,
            prongs: [2, 5, 7],
            above: 2,
            near_bar: 4,
            far_bar: 7,
            width: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientKind {
    Constant(f64),
    Channels(ChannelLayout),
    Comb(CombLayout),
    RandomBinary { p: f64, seed: u64 },
    /// Rows bottom to top; with a threshold `t`, values `> t` become
    /// `α_max` and the rest `α_min`, otherwise values are used as given.
    Raster { grid: Vec<Vec<f64>>, threshold: Option<f64> },
}

/// Low and high coefficient values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contrast {
    pub alpha_min: f64,
    pub alpha_max: f64,
}

impl Default for Contrast {
    fn default() -> Self {
        Self {
            alpha_min: 1.0,
            alpha_max: 1e6,
        }
    }
}

pub fn make_coefficient(
    mesh: &StructuredMesh,
    kind: &CoefficientKind,
    contrast: Contrast,
) -> Result<CoefficientField> {
    let n = mesh.n_elems_per_side();
    let Contrast { alpha_min: lo, alpha_max: hi } = contrast;
    if !(lo > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidParameter(format!("invalid contrast [{lo}, {hi}]")));
    }
    let mut v = vec![lo; n * n];
    let mut set = |ex: usize, ey: usize| {
        if ex < n && ey < n {
            v[ey * n + ex] = hi;
        }
    };

    match kind {
        CoefficientKind::Constant(c) => {
            return CoefficientField::from_values(n, vec![*c; n * n]);
        }
        CoefficientKind::Channels(l) => {
            let hb = block_size(n, l.subdomains_per_side)?;
            for bx in 0..l.subdomains_per_side {
                let x0 = bx * hb;
                for ey in 1..n.saturating_sub(1) {
                    for w in 0..l.width {
                        set(x0 + l.long_offset + w, ey);
                    }
                }
                for by in 1..l.subdomains_per_side {
                    let y = by * hb;
                    for s in &l.shorts {
                        for ey in y.saturating_sub(s.below)..y + s.above {
                            for w in 0..l.width {
                                set(x0 + s.offset + w, ey);
                            }
                        }
                    }
                }
            }
        }
        CoefficientKind::Comb(c) => {
            let hb = block_size(n, c.subdomains_per_side)?;
            let [p0, p1, p2] = c.prongs;
            for bx in 0..c.subdomains_per_side {
                let x0 = bx * hb;
                for by in 1..c.subdomains_per_side {
                    let y = by * hb;
                    for (p, depth) in [(p0, c.far_bar), (p1, c.near_bar), (p2, c.far_bar)] {
                        for ey in y.saturating_sub(depth)..y + c.above {
                            for w in 0..c.width {
                                set(x0 + p + w, ey);
                            }
                        }
                    }
                    for ex in x0 + p0..x0 + p1 + c.width {
                        set(ex, y.saturating_sub(c.near_bar));
                    }
                    for ex in x0 + p0..x0 + p2 + c.width {
                        set(ex, y.saturating_sub(c.far_bar));
                    }
                }
            }
        }
        CoefficientKind::RandomBinary { p, seed } => {
            if !(0.0..=1.0).contains(p) {
                return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for ey in 1..n.saturating_sub(1) {
                for ex in 1..n - 1 {
                    if rng.random::<f64>() < *p {
                        set(ex, ey);
                    }
                }
            }
        }
        CoefficientKind::Raster { grid, threshold } => {
            if grid.len() != n || grid.iter().any(|r| r.len() != n) {
                return Err(Error::RasterSize {
                    rows: grid.len(),
                    cols: grid.first().map_or(0, |r| r.len()),
                    n,
                });
            }
            let vals = match threshold {
                Some(t) => grid
                    .iter()
                    .flat_map(|r| r.iter().map(|&x| if x > *t { hi } else { lo }))
                    .collect(),
                None => grid.iter().flatten().copied().collect(),
            };
            return CoefficientField::from_values(n, vals);
        }
    }

    for e in 0..mesh.n_elements() {
        if mesh.is_boundary_element(e) {
            v[e] = lo;
        }
    }
    CoefficientField::from_values(n, v)
}

fn block_size(n: usize, per_side: usize) -> Result<usize> {
    if per_side == 0 || n % per_side != 0 {
        return Err(Error::InvalidParameter(format!(
            "{per_side} subdomains per side do not divide {n} elements"
        )));
    }
    Ok(n / per_side)
}
