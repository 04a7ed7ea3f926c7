//! Seeded random strip instances and the hook gadget.

use crate::coord::{coord_limit, to_units, Coord};
use crate::error::{Error, Result};
use crate::points::{ingest_points, Point, PointSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rust_decimal::prelude::ToPrimitive;
use rust_decimal::Decimal;
use serde::{Deserialize, Serialize};

pub const PRNG_ID: &str = "chacha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub delta: Decimal,
    pub seed: u64,
    pub scale: i64,
    /// Redraw every spacing that is not below delta.
    #[serde(default)]
    pub spacing_below_delta: bool,
}

impl GenSpec {
    pub fn new(n: usize, delta: Decimal, seed: u64, scale: i64) -> Self {
        GenSpec { n, delta, seed, scale, spacing_below_delta: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.delta <= Decimal::ZERO {
            return Err(Error::InvalidInput(format!("delta must be positive, got {}", self.delta)));
        }
        if self.scale < 1 {
            return Err(Error::InvalidInput(format!("scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }

    pub fn metadata(&self) -> GeneratorMeta {
        GeneratorMeta {
            kind: "random".into(),
            seed: Some(self.seed),
            prng: Some(PRNG_ID.into()),
            params: serde_json::to_value(self).expect("spec serializes"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMeta {
    pub kind: String,
    pub seed: Option<u64>,
    pub prng: Option<String>,
    pub params: serde_json::Value,
}

/// Exp(1) by inversion.
pub fn sample_exp(rng: &mut impl Rng) -> f64 {
    let u: f64 = rng.gen();
    -(1.0 - u).ln()
}

/// Unquantized `(x, y)` pairs in generation order, `x_i` being the sum of
/// the first `i` spacings (so the first point already sits at `Δ_0`).
pub fn sample_raw(spec: &GenSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    let delta = spec.delta.to_f64().ok_or_else(|| Error::InvalidInput("delta".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let mut d = sample_exp(&mut rng);
        while spec.spacing_below_delta && d >= delta {
            d = sample_exp(&mut rng);
        }
        x += d;
        let y = rng.gen::<f64>() * delta;
        out.push((x, y));
    }
    Ok(out)
}

pub fn generate_random_instance(spec: &GenSpec) -> Result<PointSet> {
    let raw = sample_raw(spec)?;
    let scale = spec.scale;
    let delta_units = to_units(spec.delta, scale)?;
    let limit = coord_limit(scale) as f64;
    let quantize = |v: f64| -> Result<Coord> {
        let u = (v * scale as f64).round_ties_even();
        if !u.is_finite() || u.abs() >= limit {
            return Err(Error::CoordOverflow(format!("{v}")));
        }
        Ok(u as Coord)
    };
    let points = raw
        .iter()
        .map(|&(x, y)| Ok(Point::new(quantize(x)?, quantize(y)?.clamp(0, delta_units))))
        .collect::<Result<Vec<_>>>()?;
    PointSet::new(points, delta_units, scale)
}

/// Geometry of the hook gadget, in strip units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HookParams {
    /// Horizontal distance between consecutive points of one hook. `None`
    /// uses the number of hooks, which keeps all x distinct integers; with
    /// vertical steps that small a probe can hop to a neighbouring row at the
    /// same cost as running left, so the default keeps hooks narrow instead.
    pub stride: Option<Decimal>,
    /// Vertical growth of the `<` per point.
    pub step: Decimal,
    /// Vertical distance between hooks. Defaults to filling the strip.
    pub separation: Option<Decimal>,
    /// Horizontal distance from the last hook point to the first probe.
    pub probe_gap: Decimal,
    pub scale: i64,
}

impl Default for HookParams {
    fn default() -> Self {
        HookParams {
            stride: Some(Decimal::new(1, 2)),
            step: Decimal::new(2, 1),
            separation: None,
            probe_gap: Decimal::new(1, 1),
            scale: 1000,
        }
    }
}

/// Hooks stacked top to bottom, each a `<` whose points alternately rise
/// above and drop below everything so far; a connector left of each hook
/// at its tip height, a midpoint between consecutive connectors, and one
/// probe per hook right of everything at the height of the chosen hook point.
pub fn generate_hooks(num_hooks: usize, points_per_hook: usize, delta: Decimal, probe_choices: &[usize]) -> Result<PointSet> {
    generate_hooks_with(num_hooks, points_per_hook, delta, probe_choices, &HookParams::default())
}

pub fn generate_hooks_with(
    num_hooks: usize,
    points_per_hook: usize,
    delta: Decimal,
    probe_choices: &[usize],
    params: &HookParams,
) -> Result<PointSet> {
    if num_hooks < 1 || points_per_hook < 2 {
        return Err(Error::InvalidInput("need at least one hook of two points".into()));
    }
    if probe_choices.len() != num_hooks {
        return Err(Error::InvalidInput(format!("{} probe choices for {num_hooks} hooks", probe_choices.len())));
    }
    if let Some((hook, &choice)) = probe_choices.iter().enumerate().find(|(_, &c)| c >= points_per_hook) {
        return Err(Error::InvalidProbe { hook, choice });
    }
    let d = Decimal::from;
    let m = num_hooks;
    let stride = params.stride.unwrap_or(d(m as u64));
    let reach = params.step * d(points_per_hook as u64 / 2);
    let separation = match params.separation {
        Some(s) => s,
        None if m > 1 => (delta - reach * d(2)) / d(m as u64 - 1),
        None => Decimal::ZERO,
    };
    // Tip heights, top hook first, centred in the strip.
    let span = separation * d(m as u64 - 1);
    let top = (delta + span) / d(2);
    let tip = |i: usize| top - separation * d(i as u64);
    let offset = |t: usize| {
        let k = d(t.div_ceil(2) as u64) * params.step;
        if t % 2 == 1 {
            k
        } else {
            -k
        }
    };

    let mut pts: Vec<(Decimal, Decimal)> = Vec::new();
    // Connectors and midpoints on consecutive integers, bottom hook first.
    let mut x = Decimal::ZERO;
    for i in (0..m).rev() {
        pts.push((x, tip(i)));
        x += Decimal::ONE;
        if i > 0 {
            pts.push((x, (tip(i) + tip(i - 1)) / d(2)));
            x += Decimal::ONE;
        }
    }
    // Hook i is shifted right by m - 1 - i so upper hooks sit further right.
    let x0 = x;
    let mut last = x0;
    for i in 0..m {
        for t in 0..points_per_hook {
            let px = x0 + stride * d(t as u64) + d((m - 1 - i) as u64);
            last = last.max(px);
            pts.push((px, tip(i) + offset(t)));
        }
    }
    for (i, &c) in probe_choices.iter().enumerate() {
        pts.push((last + params.probe_gap + d(i as u64), tip(i) + offset(c)));
    }
    ingest_points(&pts, delta, params.scale)
}

/// Index of the separator just left of the probes.
pub fn hook_probe_separator(num_hooks: usize, points_per_hook: usize) -> usize {
    let left = 2 * num_hooks - 1;
    left + num_hooks * points_per_hook - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coord::parse_decimal;

    fn dec(s: &str) -> Decimal {
        parse_decimal(s).unwrap()
    }

    #[test]
    fn single_point_sits_at_first_spacing() {
        let spec = GenSpec::new(1, dec("2"), 11, 1000);
        let raw = sample_raw(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        assert_eq!(raw[0].0, sample_exp(&mut rng));
        assert!(raw[0].0 > 0.0);
        let p = generate_random_instance(&spec).unwrap();
        assert_eq!(p.len(), 1);
        assert!((0..=2000).contains(&p.points()[0].y));
    }

    #[test]
    fn same_seed_same_points() {
        let spec = GenSpec::new(50, dec("2"), 7, 1000);
        assert_eq!(generate_random_instance(&spec).unwrap(), generate_random_instance(&spec).unwrap());
        let other = GenSpec { seed: 8, ..spec.clone() };
        assert_ne!(generate_random_instance(&spec).unwrap(), generate_random_instance(&other).unwrap());
    }

    #[test]
    fn rejection_keeps_spacings_small() {
        let spec = GenSpec { spacing_below_delta: true, ..GenSpec::new(2000, dec("0.5"), 3, 1_000_000) };
        let raw = sample_raw(&spec).unwrap();
        let mut prev = 0.0;
        for &(x, _) in &raw {
            assert!(x - prev < 0.5);
            prev = x;
        }
    }

    #[test]
    fn invalid_specs() {
        assert!(generate_random_instance(&GenSpec::new(0, dec("1"), 0, 10)).is_err());
        assert!(generate_random_instance(&GenSpec::new(3, dec("0"), 0, 10)).is_err());
        assert!(matches!(
            generate_random_instance(&GenSpec::new(3, dec("1"), 0, 1 << 61)),
            Err(Error::CoordOverflow(_))
        ));
    }

    #[test]
    fn metadata_names_the_generator() {
        let m = GenSpec::new(4, dec("1.5"), 9, 100).metadata();
        assert_eq!(m.prng.as_deref(), Some("chacha8"));
        assert_eq!(m.params["n"], 4);
    }

    #[test]
    fn hook_shape() {
        let p = generate_hooks(1, 5, dec("4"), &[2]).unwrap();
        // 1 connector, 5 hook points, 1 probe.
        assert_eq!(p.len(), 7);
        let ys: Vec<Coord> = p.points()[1..6].iter().map(|q| q.y).collect();
        // Alternately above the highest and below the lowest so far.
        for t in 1..ys.len() {
            let (hi, lo) = (*ys[..t].iter().max().unwrap(), *ys[..t].iter().min().unwrap());
            assert!(if t % 2 == 1 { ys[t] > hi } else { ys[t] < lo });
        }
        assert_eq!(p.points()[6].y, ys[2]);
        assert_eq!(hook_probe_separator(1, 5), 5);
        let xs: Vec<Coord> = p.points().iter().map(|q| q.x).collect();
        assert!(xs.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn hook_errors() {
        assert_eq!(generate_hooks(2, 3, dec("9"), &[0, 3]), Err(Error::InvalidProbe { hook: 1, choice: 3 }));
        assert!(generate_hooks(2, 3, dec("9"), &[0]).is_err());
        assert!(generate_hooks(1, 1, dec("9"), &[0]).is_err());
    }
}
