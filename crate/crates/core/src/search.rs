//! One-dimensional search machinery shared by the agent solver and the
//! closed-form analyzers: uniform grids, bisection, golden-section search and
//! the hybrid global maximizer.

use crate::error::Result;

/// A smooth scalar objective with analytic slope and curvature.
pub trait Objective {
    fn value(&self, t: f64) -> Result<f64>;
    fn slope(&self, t: f64) -> Result<f64>;
    fn curvature(&self, t: f64) -> Result<f64>;
}

/// `points` equally spaced abscissae from `lo` to `hi`, both included exactly.
pub fn uniform_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2, "a grid needs at least two points");
    let last = points - 1;
    let width = hi - lo;
    (0..points)
        .map(|i| {
            if i == last {
                hi
            } else {
                lo + width * (i as f64 / last as f64)
            }
        })
        .collect()
}

/// Root of `f` in `[a, b]` given `f(a)·f(b) < 0`, to an interval of width
/// `tol`. Returns an exact zero as soon as one is hit.
pub fn bisect<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a <= tol || m <= a || m >= b {
            break;
        }
        let fm = f(m)?;
        if fm == 0.0 {
            return Ok(m);
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section search for a maximum of `f` on `[a, b]`, stopping when the
/// bracket is narrower than `tol`. Returns the best point evaluated.
pub fn golden_section_max<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for _ in 0..300 {
        if b - a <= tol {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
            if fc > best.1 {
                best = (c, fc);
            }
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
            if fd > best.1 {
                best = (d, fd);
            }
        }
    }
    Ok(best)
}

/// Sign changes and exact zeros of `f` sampled on `grid`, each refined by
/// bisection to width `tol`.
pub fn bracketed_roots<F>(mut f: F, grid: &[f64], tol: f64) -> Result<Vec<f64>>
where
    F: FnMut(f64) -> Result<f64>,
{
    let values = grid.iter().map(|&t| f(t)).collect::<Result<Vec<_>>>()?;
    let mut roots = Vec::new();
    for i in 0..grid.len() {
        if values[i] == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if i + 1 < grid.len() && values[i + 1] != 0.0 && (values[i] < 0.0) != (values[i + 1] < 0.0)
        {
            roots.push(bisect(&mut f, grid[i], grid[i + 1], values[i], tol)?);
        }
    }
    Ok(roots)
}

/// Tunables of [`maximize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchSettings {
    /// Grid on which sign changes of the slope are bracketed.
    pub root_grid: usize,
    /// Grid on which the objective is scanned for local maxima.
    pub scan_grid: usize,
    /// Final bracket width of bisection and golden-section refinement.
    pub x_tol: f64,
    /// Candidates closer than this are merged.
    pub dedup_tol: f64,
    /// Relative tolerance under which candidate values count as tied.
    pub tie_rel_tol: f64,
}

impl Default for SearchSettings {
    fn default() -> Self {
        SearchSettings {
            root_grid: 1025,
            scan_grid: 4097,
            x_tol: 1e-12,
            dedup_tol: 1e-9,
            tie_rel_tol: 1e-9,
        }
    }
}

impl SearchSettings {
    /// Whether `value` is within the tie tolerance of `best`.
    pub fn ties(&self, value: f64, best: f64) -> bool {
        best - value <= self.tie_rel_tol * best.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub t: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    /// Tied maxima, ascending in `t`.
    pub maximizers: Vec<Candidate>,
    pub best: f64,
    /// The objective is flat over the whole interval; `maximizers` then holds
    /// the two endpoints as representatives.
    pub constant: bool,
}

/// Global maximum of `obj` on `[lo, hi]`.
///
/// Candidates are the endpoints, every bracketed root of the slope on the
/// coarse grid, and every local maximum of the dense scan. A scan maximum is
/// refined by bisection on the slope when the slope changes sign across its
/// bracket and by golden-section search otherwise.
pub fn maximize<O: Objective + ?Sized>(
    obj: &O,
    lo: f64,
    hi: f64,
    settings: &SearchSettings,
) -> Result<SearchOutcome> {
    let scan = uniform_grid(lo, hi, settings.scan_grid);
    let scan_values = scan
        .iter()
        .map(|&t| obj.value(t))
        .collect::<Result<Vec<_>>>()?;
    let (vmin, vmax) = scan_values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    if settings.ties(vmin, vmax) {
        let at_lo = scan_values[0];
        let at_hi = scan_values[scan_values.len() - 1];
        return Ok(SearchOutcome {
            maximizers: vec![
                Candidate {
                    t: lo,
                    value: at_lo,
                },
                Candidate {
                    t: hi,
                    value: at_hi,
                },
            ],
            best: at_lo.max(at_hi),
            constant: true,
        });
    }

    let mut points = vec![lo, hi];
    let root_grid = uniform_grid(lo, hi, settings.root_grid);
    points.extend(bracketed_roots(
        |t| obj.slope(t),
        &root_grid,
        settings.x_tol,
    )?);

    for i in 1..scan.len() - 1 {
        if scan_values[i] > scan_values[i - 1] && scan_values[i] >= scan_values[i + 1] {
            let (a, b) = (scan[i - 1], scan[i + 1]);
            let (sa, sb) = (obj.slope(a)?, obj.slope(b)?);
            let t = if sa > 0.0 && sb < 0.0 {
                bisect(|t| obj.slope(t), a, b, sa, settings.x_tol)?
            } else {
                golden_section_max(|t| obj.value(t), a, b, settings.x_tol)?.0
            };
            points.push(t);
        }
    }

    points.sort_by(f64::total_cmp);
    let mut candidates: Vec<Candidate> = Vec::with_capacity(points.len());
    for t in points {
        let value = obj.value(t)?;
        match candidates.last_mut() {
            Some(prev) if t - prev.t <= settings.dedup_tol => {
                // Keep the better of two coincident candidates; endpoints win
                // exact ties so boundary labels stay on the boundary.
                let prev_is_end = prev.t == lo || prev.t == hi;
                if value > prev.value
                    || (value == prev.value && !prev_is_end && (t == lo || t == hi))
                {
                    *prev = Candidate { t, value };
                }
            }
            _ => candidates.push(Candidate { t, value }),
        }
    }

    let best = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let maximizers = candidates
        .into_iter()
        .filter(|c| settings.ties(c.value, best))
        .collect();
    Ok(SearchOutcome {
        maximizers,
        best,
        constant: false,
    })
}
