//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use mls_cli::run::run;
use mls_cli::scenario::Scenario;
use mls_core::actions::{stable_length_bracket, stable_length_of, ActionModel, StableConfig};
use mls_core::bounds::{
    delta_metric, lemma25_check, prop31_check, thm13_check, thm15_check, Lemma25Case,
    Thm13Params, Verdict, WindowConfig,
};
use mls_core::jsl::{bf_tree_sweep, bochi_check, BochiConstants, JslConfig};
use mls_core::linalg::random_unit_det;
use mls_core::spaces::{MobiusModel, SchottkyBuilder, TreeModel, WordMetricModel};
use mls_core::words::{Alphabet, GeneratingSet, SearchLimits, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn f2() -> Alphabet {
    Alphabet::new(2).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t <= limit, || format!("took {:.1}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

fn schottky() -> MobiusModel {
    let mut b = SchottkyBuilder::new(vec![4.0, 4.0], vec![0.0, 1.2]);
    b.delta = Some(2f64.ln());
    b.build().unwrap().mobius
}

fn standard_metric() -> WordMetricModel {
    WordMetricModel::new(GeneratingSet::standard(f2()), SearchLimits::default()).unwrap()
}

fn tree_bf_sweep() -> Result<String, String> {
    let start = Instant::now();
    let cfg = JslConfig {
        n_max: 12,
        ..JslConfig::default()
    };
    let unit = TreeModel::unit(f2());
    let s = bf_tree_sweep(&unit, 3, 3, cfg).map_err(|e| e.to_string())?;
    ensure(s.lo_failures == 0, || format!("{} lower-end failures", s.lo_failures))?;
    ensure(s.width_failures == 0, || format!("{} width failures", s.width_failures))?;
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "{} subsets, max width {:.4}, {:.1}s",
        s.subsets,
        s.max_gap,
        start.elapsed().as_secs_f64()
    ))
}

fn bochi_pairs() -> Result<String, String> {
    let start = Instant::now();
    let c = BochiConstants::caps(2);
    ensure(c.c_m == 13.0 * 2f64.ln() && c.d_m == 16, || format!("constants {c:?}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..100 {
        let mats: Vec<_> = (0..2).map(|_| random_unit_det(2, &mut rng).unwrap()).collect();
        let r = bochi_check(&mats, &c, 12, 1 << 16, 0.0).map_err(|e| e.to_string())?;
        ensure(r.rhs.certified, || format!("instance {i}: right-hand side not certified"))?;
        ensure(r.jsr.hi <= r.rhs.value, || {
            format!("instance {i}: log jsr hi {} > rhs {}", r.jsr.hi, r.rhs.value)
        })?;
        worst = worst.max(r.jsr.hi - r.rhs.value);
    }
    within(start, Duration::from_secs(300))?;
    Ok(format!("100 pairs, max(jsr.hi − rhs) = {worst:.4} (log scale)"))
}

fn weighted_tree_exact() -> Result<String, String> {
    let xs = TreeModel::new(f2(), vec![1.0, 2.0]).unwrap();
    let set = GeneratingSet::standard(f2());
    for l in [1, 2, 4, 8] {
        let r = thm15_check(&xs, &set, l, 1e4, None, &WindowConfig::default())
            .map_err(|e| e.to_string())?;
        let b = r.bound.ok_or("no bound")?;
        let d = r.reference.ok_or("no reference")?;
        ensure(b.lo == 2.0 && b.hi == 2.0, || format!("L = {l}: bound [{}, {}]", b.lo, b.hi))?;
        ensure(d.lo == 2.0 && d.hi == 2.0, || format!("L = {l}: reference [{}, {}]", d.lo, d.hi))?;
        ensure(r.verdict == Verdict::Holds, || format!("L = {l}: {:?}", r.verdict))?;
    }
    Ok("bound = reference = 2 for L in {1, 2, 4, 8}".into())
}

fn schottky_pipeline() -> Result<String, String> {
    let start = Instant::now();
    let unit = TreeModel::unit(f2());
    ensure(unit.cobound() == Some(0.5), || "unit tree D".into())?;
    let xs = schottky();
    let mut ks = Vec::new();
    for l in [4.0, 6.0, 8.0, 12.0] {
        let r = thm13_check(&xs, &unit, l, Thm13Params::default(), &WindowConfig::default())
            .map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Holds, || format!("L = {l}: {:?}", r.verdict))?;
        let k = r.metrics.get("minimal_k").copied().ok_or("no minimal_k")?;
        ensure(k.is_finite(), || format!("L = {l}: minimal K = {k}"))?;
        ks.push(format!("L={l}: K_min={k}"));
    }
    within(start, Duration::from_secs(180))?;
    Ok(format!("holds; {}; {:.1}s", ks.join(", "), start.elapsed().as_secs_f64()))
}

/// `2·ln|λ_max|` from the trace of the plain f64 matrix product.
fn eigenvalue_length(m: &MobiusModel, g: &Word) -> f64 {
    let mut acc = [1.0, 0.0, 0.0, 1.0];
    for l in g.letters() {
        let c = &m.generators()[l.index() - 1];
        let (a, b, cc, d) = (c.a.re, c.b.re, c.c.re, c.d.re);
        let x = if l.is_inverse() { [d, -b, -cc, a] } else { [a, b, cc, d] };
        acc = [
            acc[0] * x[0] + acc[1] * x[2],
            acc[0] * x[1] + acc[1] * x[3],
            acc[2] * x[0] + acc[3] * x[2],
            acc[2] * x[1] + acc[3] * x[3],
        ];
    }
    let t = (acc[0] + acc[3]).abs();
    if t <= 2.0 {
        return 0.0;
    }
    let lam = (t + (t * t - 4.0).sqrt()) / 2.0;
    2.0 * lam.ln()
}

fn eigenvalue_oracle() -> Result<String, String> {
    let m = schottky();
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut widest: f64 = 0.0;
    for _ in 0..200 {
        let len = rng.random_range(1..=8);
        let g = f2().random_word(len, &mut rng);
        let b = stable_length_bracket(&m, &g, 8, 4.0).map_err(|e| e.to_string())?;
        let v = eigenvalue_length(&m, &g);
        ensure(b.lo <= v && v <= b.hi, || format!("{g}: {v} outside [{}, {}]", b.lo, b.hi))?;
        widest = widest.max(b.hi - b.lo);
    }
    Ok(format!("200 words, widest bracket {widest:.4}"))
}

fn sandwich() -> Result<String, String> {
    let unit = TreeModel::unit(f2());
    let (r, set) = lemma25_check(&unit, 4, 9, Lemma25Case::Cobounded { d: Some(0.5) }, 10_000_000)
        .map_err(|e| e.to_string())?;
    ensure(r.verdict == Verdict::Holds, || format!("{:?} {:?}", r.verdict, r.notes))?;
    ensure(r.metrics["lower_violations"] == 0.0 && r.metrics["upper_violations"] == 0.0, || {
        "violations reported".into()
    })?;
    // S_4 is the ball of radius 3, so |g|_{S_4} = ⌈|g|/3⌉; check in integers
    ensure(set.elements().len() == 4 + 12 + 36, || format!("|S_4| = {}", set.elements().len()))?;
    for len in 0i64..=9 {
        let k = (len + 2) / 3;
        ensure(2 * k - 2 <= len && len <= 3 * k, || format!("length {len}"))?;
    }
    let ball = r.metrics["ball_size"];
    ensure(ball == 39_365.0, || format!("ball size {ball}"))?;
    Ok(format!("{ball} elements checked, zero violations"))
}

fn prop31_values() -> Result<String, String> {
    let unit = TreeModel::unit(f2());
    let a = f2();
    let mut ext: Vec<(Word, f64)> = GeneratingSet::standard(a).elements().to_vec();
    ext.push((Word::parse(&a, "ab").unwrap(), 1.0));
    ext.push((Word::parse(&a, "BA").unwrap(), 1.0));
    let ext = GeneratingSet::new(a, ext).unwrap();
    let mut out = Vec::new();
    for (set, want) in [(GeneratingSet::standard(a), 1.0), (ext, 2.0)] {
        let r = prop31_check(&unit, &set, 6, JslConfig::default(), &WindowConfig::default())
            .map_err(|e| e.to_string())?;
        let m = &r.metrics;
        for key in ["dil_lo", "dil_hi", "jsl_lo", "jsl_hi"] {
            ensure(m[key] == want, || format!("{key} = {} want {want}", m[key]))?;
        }
        out.push(want.to_string());
    }
    Ok(format!("Dil = joint stable length = {}", out.join(", ")))
}

fn property_suites() -> Result<String, String> {
    let cfg = StableConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let m = schottky();
    let word = |rng: &mut ChaCha8Rng, max: usize| {
        let len = rng.random_range(1..=max);
        f2().random_word(len, rng)
    };
    let len = |model: &dyn ActionModel, g: &Word| stable_length_of(model, g, cfg).unwrap().lo;
    let rel = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0);
    const N: usize = 500;
    for _ in 0..N {
        let t = TreeModel::new(f2(), vec![rng.random_range(1..=5) as f64, rng.random_range(1..=5) as f64])
            .unwrap();
        let (g, h, k) = (word(&mut rng, 8), word(&mut rng, 5), rng.random_range(2..5usize));
        let l = len(&t, &g);
        ensure(len(&t, &g.pow(k)) == k as f64 * l, || format!("tree homogeneity {g}"))?;
        ensure(len(&t, &h.mul(&g).mul(&h.inverse())) == l, || format!("tree conjugation {g}"))?;
        let l = len(&m, &g);
        ensure(rel(len(&m, &g.pow(k)), k as f64 * l), || format!("matrix homogeneity {g}"))?;
        ensure(rel(len(&m, &h.mul(&g).mul(&h.inverse())), l), || format!("matrix conjugation {g}"))?;
    }
    let wcfg = WindowConfig {
        window_cap: 6,
        ..WindowConfig::default()
    };
    let tree = |rng: &mut ChaCha8Rng| {
        TreeModel::new(f2(), vec![rng.random_range(1..=6) as f64, rng.random_range(1..=6) as f64]).unwrap()
    };
    for _ in 0..N {
        let (x, y, z) = (tree(&mut rng), tree(&mut rng), tree(&mut rng));
        let d = |a: &TreeModel, b: &TreeModel| delta_metric(a, b, 6.0, &wcfg).unwrap().delta;
        let (xy, yx, yz, xz) = (d(&x, &y), d(&y, &x), d(&y, &z), d(&x, &z));
        let ratio = |a: &TreeModel, b: &TreeModel| {
            a.weights().iter().zip(b.weights()).map(|(p, q)| p / q).fold(0.0, f64::max)
        };
        let oracle = (ratio(&x, &y) * ratio(&y, &x)).ln();
        ensure(xy.lo == oracle && xy.hi == oracle, || format!("Δ {:?} vs {oracle}", xy))?;
        ensure(xy.lo == yx.lo, || "Δ symmetry".into())?;
        ensure(d(&x, &x).hi == 0.0, || "Δ(X, X) ≠ 0".into())?;
        ensure(xz.lo <= xy.hi + yz.hi + 1e-12, || "Δ triangle inequality".into())?;
        let scaled = x.scaled(3.0).unwrap();
        ensure(d(&x, &scaled).hi.abs() <= 1e-15, || "Δ(X, 3X) ≠ 0".into())?;
    }
    let sm = standard_metric();
    let unit = TreeModel::unit(f2());
    let dm = delta_metric(&sm, &unit, 6.0, &WindowConfig::default()).map_err(|e| e.to_string())?;
    ensure(dm.delta.hi == 0.0, || format!("Δ(word metric, unit tree) = {:?}", dm.delta))?;
    Ok(format!("{N} cases each: homogeneity, conjugation (tree and matrix), Δ axioms"))
}

fn shipped_scenarios() -> Result<String, String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut paths: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    let mut reports = 0;
    for p in &paths {
        let s = Scenario::parse(&std::fs::read_to_string(p).unwrap()).map_err(|e| e.to_string())?;
        let r = run(&s).map_err(|e| e.to_string())?;
        let name = p.file_name().unwrap().to_string_lossy();
        ensure(r.summary.violated == 0, || format!("{name}: violated"))?;
        ensure(r.summary.errors == 0, || format!("{name}: verifier error"))?;
        reports += r.outcomes.iter().map(|o| o.reports.len()).sum::<usize>();
    }
    Ok(format!("{} scenarios, {reports} reports, none violated", paths.len()))
}

fn main() {
    let criteria: [(&str, Check); 9] = [
        ("tree joint stable length sweep", tree_bf_sweep),
        ("Bochi inequality on 100 random pairs", bochi_pairs),
        ("weighted tree exact bound", weighted_tree_exact),
        ("Schottky vs unit tree dilation bound", schottky_pipeline),
        ("eigenvalue oracle for length brackets", eigenvalue_oracle),
        ("word length sandwich", sandwich),
        ("dilation equals joint stable length", prop31_values),
        ("property suites", property_suites),
        ("shipped scenarios never violated", shipped_scenarios),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let res = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match res {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
