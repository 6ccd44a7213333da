//! Acceptance criteria 1-10. Runs without the test harness so that every
//! criterion prints one PASS/FAIL line; exits nonzero if any fails.

use std::f64::consts::PI;
use std::io::Write;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fnalg::laws::{self, Suite, Worst};
use fnalg::model::{
    normal_pdf, normalization_config, total_mass, transform_model, transformed_aom, ContinuousModel, Datum, Normal,
};
use fnalg::{
    add, builtins, catalog, compose, definite_integral, derivative_maker_calls, fd_derivative, simpson, FdConfig,
    Function, Interval, QuadratureConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fnalg"))
}

fn within(what: &str, got: f64, tol: f64) -> Result<(), String> {
    if got <= tol {
        Ok(())
    } else {
        Err(format!("{what}: {got:.3e} exceeds {tol:.1e}"))
    }
}

fn timed(limit: Duration, start: Instant) -> Result<String, String> {
    let took = start.elapsed();
    if took < limit {
        Ok(format!("{:.0} ms", took.as_secs_f64() * 1e3))
    } else {
        Err(format!("took {took:?}, limit {limit:?}"))
    }
}

fn report(suite: Suite, law: &str) -> Result<laws::LawReport, String> {
    laws::run(suite, None)
        .into_iter()
        .find(|r| r.law == law)
        .ok_or_else(|| format!("no law named {law:?}"))
}

fn chain_rule() -> Outcome {
    let start = Instant::now();
    let pool = ["sin", "cos", "exp", "sqr_real", "exp2x"];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let fd = FdConfig::default();
    let mut w = Worst::new();
    for _ in 0..25 {
        let (a, b) = (pool[rng.random_range(0..5)], pool[rng.random_range(0..5)]);
        let c = compose(&catalog().function(a).unwrap(), &catalog().function(b).unwrap());
        let (d, oracle) = (c.derivative().map_err(|e| e.to_string())?, fd_derivative(&c, fd));
        for _ in 0..100 {
            let x = rng.random_range(-0.5..0.5);
            let v = d.apply(x).map_err(|e| e.to_string())?;
            w.note(
                format!("{a}.{b} at {x}"),
                (v - oracle.apply(x).unwrap()).abs() / (1.0 + v.abs()),
            );
        }
    }
    // Every ordered pair on a regular grid as well.
    laws::chain_rule(&mut w, 100).map_err(|e| e.to_string())?;
    within(&format!("worst at {}", w.at), w.error, 1e-4)?;
    Ok(format!(
        "worst {:.2e} at {}, {}",
        w.error,
        w.at,
        timed(Duration::from_secs(1), start)?
    ))
}

fn inverse_composition() -> Outcome {
    let r = report(Suite::Inverse, "inverse of a composition")?;
    if let Some(f) = r.failure {
        return Err(f);
    }
    within(&format!("worst at {}", r.worst_at), r.error, 1e-8)?;
    Ok(format!("worst relative error {:.2e}", r.error))
}

fn lazy_tower() -> Outcome {
    let before = derivative_maker_calls();
    let f = compose(&builtins::exp2x(), &builtins::sin()).renamed("tower");
    let _sum = add(&f, &builtins::exp2x());
    let made = derivative_maker_calls() - before;
    if made != 0 {
        return Err(format!("building composites ran {made} derivative makers"));
    }
    let d3 = laws::third_derivative_exp2x().map_err(|e| e.to_string())?;
    within("|f'''(0) - 8|", (d3 - 8.0).abs(), 1e-2)?;
    Ok(format!("f'''(0) = {d3:.6}, 0 maker calls while composing"))
}

fn sum_rule() -> Outcome {
    let pool = ["sin", "cos", "exp", "sqr_real", "succ", "pred", "identity"];
    let mut worst: f64 = 0.0;
    for a in pool {
        for b in pool {
            let (f, g) = (catalog().function(a).unwrap(), catalog().function(b).unwrap());
            let lhs = add(&f, &g).derivative().map_err(|e| e.to_string())?;
            let rhs = add(&f.derivative().unwrap(), &g.derivative().unwrap());
            for x in Interval::new(-3.0, 3.0).unwrap().grid(100) {
                worst = worst.max((lhs.apply(x).unwrap() - rhs.apply(x).unwrap()).abs());
            }
        }
    }
    within("worst |(f+g)' - (f'+g')|", worst, 1e-10)?;
    Ok(format!("worst {worst:.2e}"))
}

fn permutations() -> Outcome {
    let start = Instant::now();
    let (e, pairs) = laws::perm_exhaustive(None).map_err(|e| e.to_string())?;
    if e != 0.0 || pairs < 576 {
        return Err(format!("exhaustive: mismatch {e} over {pairs} pairs"));
    }
    let e = laws::perm_random(200, 8, 8).map_err(|e| e.to_string())?;
    if e != 0.0 {
        return Err(format!("random n = 8: mismatch {e}"));
    }
    let group = report(Suite::Perm, "group laws (n <= 4)")?;
    if !group.passed {
        return Err(group.to_string());
    }
    Ok(format!(
        "{pairs} exhaustive pairs + 200 random at n = 8, {}",
        timed(Duration::from_secs(1), start)?
    ))
}

fn polar_determinant() -> Outcome {
    let mut w = Worst::new();
    laws::polar_determinant_grid(&mut w, 20).map_err(|e| e.to_string())?;
    within(&format!("worst at {}", w.at), w.error, 1e-5)?;
    Ok(format!("worst |det J - r| {:.2e} on a 20x20 grid", w.error))
}

fn integration() -> Outcome {
    let cfg = QuadratureConfig::default();
    let s = definite_integral(&builtins::sin(), 0.0, PI, &cfg).map_err(|e| e.to_string())?;
    within("|int sin - 2|", (s - 2.0).abs(), 1e-9)?;
    let cubic = Function::from_fn(|x| 2.0 * x * x * x - x * x + 3.0);
    let exact = |x: f64| 0.5 * x.powi(4) - x.powi(3) / 3.0 + 3.0 * x;
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.0, 1.0), (-2.0, 3.0), (1.5, -0.5)] {
        worst = worst.max((simpson(&cubic, a, b, &cfg).unwrap() - (exact(b) - exact(a))).abs());
    }
    within("cubic exactness", worst, 1e-12)?;
    for law in ["derivative of the antiderivative", "integral of the derivative"] {
        let r = report(Suite::Integral, law)?;
        if !r.passed {
            return Err(r.to_string());
        }
    }
    Ok(format!("int sin = {s:.12}, cubic error {worst:.1e}, FTC both ways"))
}

fn lognormal_demo() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let normal = rand_distr::Normal::new(1.0, 0.5).unwrap();
    let mut file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
    writeln!(file, "value").unwrap();
    for _ in 0..10_000 {
        let v: f64 = normal.sample(&mut rng);
        writeln!(file, "{}", v.exp()).unwrap();
    }
    file.flush().unwrap();
    let out = bin()
        .arg("demo-lognormal")
        .arg(file.path())
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(String::from_utf8_lossy(&out.stderr).into_owned());
    }
    let text = String::from_utf8_lossy(&out.stdout).into_owned();
    let param = |k: &str| -> Result<f64, String> {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{k} = ")))
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| format!("no {k} line in {text:?}"))
    };
    let (mu, sigma) = (param("mu")?, param("sigma")?);
    within("|mu - 1|", (mu - 1.0).abs(), 0.02)?;
    within("|sigma - 0.5|", (sigma - 0.5).abs(), 0.02)?;

    let t = transform_model(Arc::new(Normal::new(mu, sigma).unwrap()), &builtins::log()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for y in Interval::new(0.01, 30.0).unwrap().grid(500) {
        worst = worst.max((t.density(y).unwrap() - normal_pdf(y.ln(), mu, sigma) / y).abs());
    }
    within("density vs closed form", worst, 1e-10)?;
    let aom = transformed_aom(&builtins::log(), &Datum::new(2.0, 0.1).unwrap()).unwrap();
    within("|aom - 0.05|", (aom - 0.05).abs(), 1e-6)?;
    Ok(format!(
        "mu = {mu:.4}, sigma = {sigma:.4}, density error {worst:.1e}, aom {aom}, {}",
        timed(Duration::from_secs(5), start)?
    ))
}

fn normalization() -> Outcome {
    let cfg = normalization_config();
    let cases: [(&str, f64, f64); 8] = [
        ("identity", 0.0, 1.0),
        ("succ", 1.0, 2.0),
        ("pred", -3.0, 0.5),
        ("log", 1.0, 0.5),
        ("exp", 5.0, 0.5),
        ("oneOver", 2.0, 0.2),
        ("arcsin", 0.0, 0.15),
        ("sin_restricted", 0.0, 0.1),
    ];
    let mut worst = (String::new(), 0.0f64);
    for (key, mu, sigma) in cases {
        let t = transform_model(
            Arc::new(Normal::new(mu, sigma).unwrap()),
            &catalog().function(key).unwrap(),
        )
        .map_err(|e| format!("{key}: {e}"))?;
        let err = (total_mass(&t, &cfg).map_err(|e| format!("{key}: {e}"))? - 1.0).abs();
        if err >= worst.1 {
            worst = (t.name(), err);
        }
    }
    let polar = (laws::polar_mass().map_err(|e| e.to_string())? - 1.0).abs();
    if polar >= worst.1 {
        worst = ("polar".into(), polar);
    }
    within(&format!("worst |mass - 1| ({})", worst.0), worst.1, 1e-3)?;
    Ok(format!(
        "{} models, worst |mass - 1| {:.2e} ({})",
        cases.len() + 1,
        worst.1,
        worst.0
    ))
}

fn check_exit_codes() -> Outcome {
    let mut seen = Vec::new();
    let runs: [(Option<&str>, i32); 4] = [
        (None, 0),
        (Some("wrong-inverse"), 1),
        (Some("wrong-derivative"), 1),
        (Some("broken-permutation"), 1),
    ];
    for (fault, want) in runs {
        let mut cmd = bin();
        cmd.args(["check", "all"]);
        if let Some(f) = fault {
            cmd.args(["--inject-fault", f]);
        }
        let out = cmd.output().map_err(|e| e.to_string())?;
        let code = out.status.code().unwrap_or(-1);
        let label = fault.unwrap_or("none");
        if code != want {
            return Err(format!("fault {label}: exit {code}, expected {want}"));
        }
        seen.push(format!("{label}={code}"));
    }
    Ok(seen.join(" "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("chain rule vs finite differences", chain_rule),
        ("inverse of a composition", inverse_composition),
        ("lazy derivative tower of exp2x", lazy_tower),
        ("sum rule", sum_rule),
        ("permutation compose vs brute force", permutations),
        ("polar Jacobian determinant", polar_determinant),
        ("Simpson integration", integration),
        ("log-Normal demo", lognormal_demo),
        ("normalization of transformed models", normalization),
        ("check exit codes under fault injection", check_exit_codes),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
