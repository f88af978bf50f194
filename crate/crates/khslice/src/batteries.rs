//! Property batteries behind `geom`, `slice verify` and `curves`. Random
//! samples come from per-index ChaCha streams, so results do not depend on
//! the number of worker threads.

use std::f64::consts::PI;
use std::path::Path;

use khslice_core::braid::{BraidWord, Letter};
use khslice_core::curves::{
    intersection, slide, standard_matching, ArcSystem, Half, MarkedDisc, Matching, SlidePath,
};
use khslice_core::slice::{
    adjoint_quotient, assemble, char_poly, chi_jacobian_rank, critical_value_squared_exact, cstar_action,
    eigenprojection_injective, embed_lower, sl3_normal_form, sl3_residual, sl3_verify_exact, GaussQ, SliceMatrix,
    C64, SL3_TOL,
};
use khslice_core::transport::{
    a1_energy_check, a1_monodromy_check, a1_scaling, a2_monodromy, exhaustion_check, maslov_markov_with,
    MarkovSign, PointCloud, TransportOptions, DEPARTURE_TOL, FIBER_TOL,
};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::report::{Check, Report};

pub const SLICE_SAMPLES: usize = 1000;
pub const CURVE_SAMPLES: usize = 200;
pub const CLOUD_SAMPLES: usize = 200;
pub const LOOP_TOL: f64 = 1e-4;
pub const SCALING_TOL: f64 = 1e-6;
pub const MOMENT_TOL: f64 = 1e-4;

fn check(name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.to_string(), passed, detail: detail.into() }
}

/// `f(rng, k)` for `k < n`, where `rng` is stream `k` of the generator
/// seeded with `seed`.
pub fn sampled<T, F>(seed: u64, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> T + Sync,
{
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            f(&mut rng, k)
        })
        .collect()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn unit_disc(rng: &mut ChaCha8Rng) -> C64 {
    loop {
        let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 {
            return z;
        }
    }
}

pub fn random_slice(rng: &mut ChaCha8Rng, m: usize) -> SliceMatrix {
    let x: Vec<C64> = (0..SliceMatrix::dimension(m)).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    SliceMatrix::from_coordinates(m, &x).expect("random coordinates give a valid slice point")
}

fn gauss(rng: &mut ChaCha8Rng) -> GaussQ {
    let den = rng.gen_range(1..12);
    GaussQ::new(Ratio::new(rng.gen_range(-30..30), den), Ratio::new(rng.gen_range(-30..30), den))
}

fn fmax(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, f64::max)
}

pub fn sl3_checks(n: usize, seed: u64) -> Vec<Check> {
    let exact = sampled(seed, n, |rng, _| sl3_verify_exact(gauss(rng), gauss(rng), gauss(rng), gauss(rng)).is_ok());
    let zero = GaussQ::new(Ratio::from_integer(0), Ratio::from_integer(0));
    let diagonal = [(1, 2), (-3, 5), (7, -1), (2, 0)].iter().all(|&(a, d)| {
        let alpha = GaussQ::new(Ratio::new(a, 3), Ratio::from_integer(0));
        let delta = GaussQ::new(Ratio::new(d, 7), Ratio::from_integer(0));
        sl3_verify_exact(alpha, zero, zero, delta).is_ok()
    });
    let numeric = sampled(seed ^ 1, n, |rng, _| {
        let (a, b, g, d) = (unit_disc(rng), unit_disc(rng), unit_disc(rng), unit_disc(rng));
        if sl3_normal_form(a, b, g, d).is_ok() {
            sl3_residual(a, b, g, d)
        } else {
            f64::INFINITY
        }
    });
    let worst = fmax(numeric);
    vec![
        check(
            "sl3-exact",
            diagonal && exact.iter().all(|&ok| ok),
            format!("{} rational points plus the diagonal family", n),
        ),
        check("sl3-numeric", worst <= SL3_TOL, format!("{n} points, max residual {worst:.2e}")),
    ]
}

pub fn slice_checks(n: usize, seed: u64, tol: f64) -> Vec<Check> {
    let mut out = sl3_checks(n, seed);

    let subleading = fmax(sampled(seed ^ 2, n, |rng, k| {
        let y = random_slice(rng, 1 + k % 4);
        char_poly(&assemble(&y))[1].norm()
    }));
    out.push(check("subleading-coefficient", subleading < 1e-10, format!("max |c_1| {subleading:.2e}")));

    let inj = sampled(seed ^ 3, n, |rng, k| {
        let y = random_slice(rng, 1 + k % 4);
        match adjoint_quotient(&y) {
            Ok(s) => s.values().iter().all(|&mu| {
                let r = eigenprojection_injective(&y, mu);
                r.kernel_dim >= 1 && r.injective()
            }),
            Err(_) => false,
        }
    });
    let bad = inj.iter().filter(|&&ok| !ok).count();
    out.push(check("eigenprojection-injective", bad == 0, format!("{n} points, m <= 4, {bad} failing")));

    let half = (n / 2).max(1);
    let embed = sampled(seed ^ 4, half, |rng, k| {
        let y = random_slice(rng, 1 + k % 3);
        match (adjoint_quotient(&y), adjoint_quotient(&embed_lower(&y))) {
            (Ok(s), Ok(e)) => e.distance(&s.with(&[c(0.0, 0.0), c(0.0, 0.0)])).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        }
    });
    let worst = fmax(embed);
    out.push(check("embed-lower-spectrum", worst < tol, format!("{half} points, max distance {worst:.2e}")));

    let eq = sampled(seed ^ 5, half, |rng, k| {
        let y = random_slice(rng, 1 + k % 4);
        let r = C64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..2.0 * PI));
        match (adjoint_quotient(&y), cstar_action(r, &y).map(|z| adjoint_quotient(&z))) {
            (Ok(s), Ok(Ok(t))) => t.distance(&s.scaled(r * r)).unwrap_or(f64::INFINITY),
            _ => f64::INFINITY,
        }
    });
    let worst = fmax(eq);
    out.push(check("cstar-equivariance", worst < tol, format!("{half} points, max distance {worst:.2e}")));

    let ranks = sampled(seed ^ 6, 40, |rng, k| {
        let m = 1 + k % 4;
        let full = chi_jacobian_rank(&random_slice(rng, m));
        let drop = if m >= 2 {
            let j = chi_jacobian_rank(&embed_lower(&random_slice(rng, m - 1)));
            j.rank + 1 == j.expected_full
        } else {
            true
        };
        full.rank == full.expected_full && drop
    });
    out.push(check(
        "jacobian-rank",
        ranks.iter().all(|&ok| ok),
        "full at random points, one less on embedded points",
    ));

    let exact_cv = (-20i128..20).all(|num| {
        (1i128..8).all(|den| {
            let d = Ratio::new(num, den);
            critical_value_squared_exact(d) * 27 == d * d * d * 4
        })
    });
    out.push(check("critical-values", exact_cv, "27 zeta^2 = 4 d^3 over rational d"));

    let exhaustion: Vec<_> = (1..=3).map(|m| exhaustion_check(m as f64 + 0.5, m, 200, seed)).collect();
    let ok = exhaustion.iter().all(|r| r.as_ref().is_ok_and(|r| r.passed()));
    out.push(check("exhaustion-formula", ok, "subharmonic and homogeneous for m <= 3"));
    out
}

pub fn slice_report(n: usize, seed: u64, tol: f64) -> Report {
    let mut r = Report::new("slice verify", seed);
    r.extend(slice_checks(n, seed, tol));
    r.insert("samples", n);
    r.insert("spectrum_tol", tol);
    r
}

/// Rows `fibre_re, fibre_im, h, phi, a_re, a_im, b_re, b_im, c_re, c_im`.
pub fn write_points(cloud: &PointCloud, path: &Path) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["fibre_re", "fibre_im", "h", "phi", "a_re", "a_im", "b_re", "b_im", "c_re", "c_im"])?;
    for (p, [h, phi]) in cloud.points.iter().zip(&cloud.params) {
        let mut row = vec![cloud.fiber.re, cloud.fiber.im, *h, *phi];
        row.extend(p.iter().flat_map(|z| [z.re, z.im]));
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()
}

/// The A1 battery; also returns the cloud after the full loop.
pub fn a1_report(t: f64, n: usize, tol: f64, opts: &TransportOptions) -> (Report, Option<PointCloud>) {
    let mut r = Report::new(format!("geom a1 --t {t}"), 0);
    r.insert("t", t);
    r.insert("samples", n);
    match a1_scaling(t, &[t / 4.0, t * 1e-2, t * 1e-4, t * 1e-6], n, opts) {
        Ok(s) => {
            let rel = s.max_error() / t.sqrt();
            r.check("sqrt-t-scaling", rel < SCALING_TOL, format!("max error / sqrt(t) {rel:.2e}"));
            r.check("scaling-fibre", s.fiber_residual < FIBER_TOL, format!("residual {:.2e}", s.fiber_residual));
            r.insert("scaling", &s);
        }
        Err(e) => r.check("sqrt-t-scaling", false, e.to_string()),
    }
    let mut cloud = None;
    match a1_monodromy_check(t, n, tol, opts) {
        Ok(m) => {
            r.check("loop-setwise", m.setwise, format!("Hausdorff {:.2e} (tol {tol:.0e})", m.full.off_sphere));
            r.check("half-loop", m.half_loop, format!("lands on -t, off sphere {:.2e}", m.half.off_sphere));
            r.line(format!(
                "pointwise antipodal deviation {:.2e}{}",
                m.full.pointwise,
                if m.antipodal { "" } else { " (above 1e-3; informational only)" }
            ));
            r.insert("full_loop_off_sphere", m.full.off_sphere);
            r.insert("antipodal_deviation", m.full.pointwise);
            r.insert("antipodal", m.antipodal);
            cloud = Some(m.full.cloud);
        }
        Err(e) => r.check("loop-setwise", false, e.to_string()),
    }
    match a1_energy_check(t, t * 1e-8, n.min(50), opts) {
        Ok(e) => {
            r.check("energy-bound", e.passed(), format!("length {:.4} vs bound {:.4} (+50%)", e.max_length, e.bound));
            r.insert("energy", e);
        }
        Err(e) => r.check("energy-bound", false, e.to_string()),
    }
    (r, cloud)
}

/// The A2 battery; also returns the cloud transported along `γ^power`.
pub fn a2_report(d: f64, eps: f64, power: i32, n: usize, tol: f64, opts: &TransportOptions) -> (Report, Option<PointCloud>) {
    let mut r = Report::new(format!("geom a2 --d {d} --eps {eps} --power {power}"), 0);
    match a2_monodromy(d, eps, power, n, opts) {
        Ok(a) => {
            r.check("moment-gap", a.moment_gap < tol, format!("max ||b| - |c|| {:.2e}", a.moment_gap));
            r.check("fibre", a.fiber_residual < FIBER_TOL, format!("residual {:.2e}", a.fiber_residual));
            r.check(
                "departure-leg",
                a.departure_drift < DEPARTURE_TOL,
                format!("drift {:.2e}", a.departure_drift),
            );
            r.check(
                "intersection-pattern",
                a.pattern == a.expected,
                format!("({}, {}), curves module gives ({}, {})", a.pattern.0, a.pattern.1, a.expected.0, a.expected.1),
            );
            r.line(format!("reduced crossing word {:?}", a.reduced));
            r.insert("pattern", a.pattern);
            r.insert("expected", a.expected);
            r.insert("moment_gap", a.moment_gap);
            r.insert("departure_drift", a.departure_drift);
            r.insert("crossings", &a.crossings);
            r.insert("reduced", &a.reduced);
            (r, Some(a.cloud))
        }
        Err(e) => {
            r.check("a2-transport", false, e.to_string());
            (r, None)
        }
    }
}

pub fn maslov_report(opts: &TransportOptions) -> Report {
    let mut r = Report::new("geom maslov", 0);
    for (sign, name, want) in [(MarkovSign::Plus, "maslov-plus", 0), (MarkovSign::Minus, "maslov-minus", 2)] {
        match maslov_markov_with(1.0, 1e-3, sign, opts) {
            Ok(m) => {
                r.check(name, m.index == want, format!("index {} (eigenvalues {:.3e}, {:.3e})", m.index, m.eigenvalues[0], m.eigenvalues[1]));
                r.insert(name, m);
            }
            Err(e) => r.check(name, false, e.to_string()),
        }
    }
    r
}

fn word(n: usize, ints: &[i64]) -> BraidWord {
    BraidWord::from_ints(n, ints).expect("generators below the strand count")
}

pub fn random_word(rng: &mut ChaCha8Rng, n: usize, len: usize) -> BraidWord {
    let letters = (0..len).map(|_| Letter::new(rng.gen_range(1..n), if rng.gen_bool(0.5) { 1 } else { -1 })).collect();
    BraidWord::new(n, letters).expect("generators below the strand count")
}

/// Disjoint neighbour segments (at least one), moved by a random braid of
/// length at most 10.
pub fn random_arc_system(rng: &mut ChaCha8Rng, n: usize) -> ArcSystem {
    let disc = MarkedDisc::new(n).expect("at least two points");
    let mut arcs = Vec::new();
    let mut i = 1;
    while i < n {
        if rng.gen_bool(0.5) {
            arcs.push(disc.segment(i, i + 1).expect("neighbours"));
            i += 2;
        } else {
            i += 1;
        }
    }
    if arcs.is_empty() {
        let i = rng.gen_range(1..n);
        arcs.push(disc.segment(i, i + 1).expect("neighbours"));
    }
    let system = ArcSystem::new(disc, arcs).expect("disjoint segments");
    let len = rng.gen_range(0..=10);
    system.act(&random_word(rng, n, len)).expect("matching strands")
}

/// Braid relations, invertibility and intersection symmetry on `samples`
/// random systems for each `n <= max_n`. Returns failures per property.
pub fn curve_relations(samples: usize, max_n: usize, seed: u64) -> [(String, usize); 3] {
    let mut fails = [0usize; 3];
    let mut total = [0usize; 3];
    for n in 2..=max_n {
        let res = sampled(seed ^ ((n as u64) << 32), samples, |rng, _| {
            let a = random_arc_system(rng, n);
            let mut f = [0usize; 3];
            let mut t = [0usize; 3];
            let act = |ints: &[i64]| a.act(&word(n, ints)).expect("matching strands");
            for k in 1..n as i64 {
                if k + 1 < n as i64 {
                    t[0] += 1;
                    f[0] += (act(&[k, k + 1, k]) != act(&[k + 1, k, k + 1])) as usize;
                }
                for l in k + 2..n as i64 {
                    t[0] += 1;
                    f[0] += (act(&[k, l]) != act(&[l, k])) as usize;
                }
                t[1] += 2;
                f[1] += (act(&[k, -k]) != a) as usize + (act(&[-k, k]) != a) as usize;
            }
            let len = rng.gen_range(1..=8);
            let w = random_word(rng, n, len);
            t[1] += 1;
            let back = a.act(&w.inverse()).and_then(|b| b.act(&w)).expect("matching strands");
            f[1] += (back != a) as usize;
            let b = random_arc_system(rng, n);
            t[2] += 1;
            f[2] += (intersection(&a, &b) != intersection(&b, &a)) as usize;
            (f, t)
        });
        for (f, t) in res {
            for i in 0..3 {
                fails[i] += f[i];
                total[i] += t[i];
            }
        }
    }
    let names = ["braid-relations", "invertibility", "intersection-symmetry"];
    core::array::from_fn(|i| (format!("{} ({} cases)", names[i], total[i]), fails[i]))
}

/// `act(s_{2m-k}^{-1} s_k, upper matching)` for `1 <= k < 2m`: whether it
/// is literally the upper matching, and whether it is a single slide of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShadowCase {
    pub m: usize,
    pub k: usize,
    pub literal: bool,
    pub one_slide: bool,
}

pub fn markov_shadow(max_m: usize) -> Vec<ShadowCase> {
    let mut out = Vec::new();
    for m in 1..=max_m {
        let p = standard_matching(m, Half::Upper);
        for k in 1..2 * m {
            let moved = p.act(&word(2 * m, &[k as i64, -((2 * m - k) as i64)])).expect("matching strands");
            let literal = moved == p;
            let one_slide = literal || is_one_slide(&p, &moved);
            out.push(ShadowCase { m, k, literal, one_slide });
        }
    }
    out
}

fn is_one_slide(p: &Matching, q: &Matching) -> bool {
    let n = 2 * p.m();
    (1..=n).any(|x| {
        (1..=n).any(|y| {
            [Half::Upper, Half::Lower].into_iter().any(|half| {
                [false, true].into_iter().any(|reverse| slide(p, (x, y), SlidePath { half, reverse }).is_ok_and(|s| &s == q))
            })
        })
    })
}

/// `(shared endpoints, interior points)` of `α = [2,3]` and its image under
/// `s_1^power` on three points.
pub fn twist_pattern(power: usize) -> (usize, usize) {
    let disc = MarkedDisc::new(3).expect("three points");
    let alpha = disc.segment(2, 3).expect("neighbours");
    let image = alpha.act(&word(3, &vec![1; power])).expect("matching strands");
    let x = intersection(
        &ArcSystem::new(disc, vec![alpha]).expect("one arc"),
        &ArcSystem::new(disc, vec![image]).expect("one arc"),
    );
    (x.endpoints, x.interior)
}

pub fn curves_report(samples: usize, seed: u64) -> Report {
    let mut r = Report::new("curves", seed);
    for (name, fails) in curve_relations(samples, 8, seed) {
        r.check(&name, fails == 0, format!("{samples} random systems per n <= 8, {fails} failing"));
    }
    let shadow = markov_shadow(4);
    let literal: Vec<(usize, usize)> = shadow.iter().filter(|s| s.literal).map(|s| (s.m, s.k)).collect();
    r.check(
        "markov-i-shadow",
        shadow.iter().all(|s| s.one_slide),
        format!("m <= 4: every image is the upper matching up to one slide; literally equal only at {literal:?}"),
    );
    r.insert("shadow_literal", &literal);
    for (power, want) in [(1, (1, 0)), (3, (1, 1))] {
        let got = twist_pattern(power);
        r.check(format!("twist-pattern-{power}"), got == want, format!("{got:?}"));
    }
    let opposite = (1..=4).all(|m| {
        let x = intersection(standard_matching(m, Half::Upper).system(), standard_matching(m, Half::Lower).system());
        (x.endpoints, x.interior) == (2 * m, 0)
    });
    r.check("upper-vs-lower", opposite, "(2m, 0) for m <= 4");
    r
}

/// Acts on `matching` by `braid` and intersects the result with `against`
/// (the original matching by default).
pub fn curves_act_report(matching: &Matching, braid: &BraidWord, against: Option<&Matching>) -> Result<Report, String> {
    let moved = matching.act(braid).map_err(|e| e.to_string())?;
    let other = against.unwrap_or(matching);
    if other.m() != moved.m() {
        return Err(format!("matchings on {} and {} points", 2 * moved.m(), 2 * other.m()));
    }
    let x = intersection(moved.system(), other.system());
    let mut r = Report::new(format!("curves act {braid}"), 0);
    r.line(format!("input  {matching}"));
    r.line(format!("result {moved}"));
    r.line(format!(
        "intersection with {other}: {} endpoint(s), {} interior{}",
        x.endpoints,
        x.interior,
        if x.degenerate { " (shared arcs left out)" } else { "" }
    ));
    r.insert("result", moved.to_string());
    r.insert("intersection", x);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use khslice_core::slice::SPECTRUM_TOL;

    #[test]
    fn streams_are_thread_independent() {
        let a = sampled(5, 16, |rng, _| rng.gen::<u64>());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| sampled(5, 16, |rng, _| rng.gen::<u64>()));
        assert_eq!(a, b);
        assert_ne!(a[0], a[1]);
    }

    #[test]
    fn random_systems_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=8 {
            let s = random_arc_system(&mut rng, n);
            assert!(!s.arcs().is_empty() && s.disc().points() == n);
        }
    }

    #[test]
    fn small_batteries() {
        assert!(slice_checks(40, 2, SPECTRUM_TOL).iter().all(|c| c.passed));
        for (name, fails) in curve_relations(10, 6, 1) {
            assert_eq!(fails, 0, "{name}");
        }
        assert_eq!(twist_pattern(1), (1, 0));
        assert_eq!(twist_pattern(3), (1, 1));
    }

    #[test]
    fn shadow_cases() {
        let s = markov_shadow(3);
        assert_eq!(s.len(), 1 + 3 + 5);
        assert!(s.iter().all(|c| c.one_slide && c.literal == (c.k == c.m)));
    }
}
