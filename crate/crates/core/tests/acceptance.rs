//! End-to-end acceptance checks. Run with `cargo test --test acceptance`;
//! pass criterion numbers as arguments to run a subset.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use lindfrag::dynamics::{evolve_echo, evolve_tfim, time_grid, EchoOptions};
use lindfrag::effective::restrict;
use lindfrag::fragments::{count_by_size, fragment_of, parse_seed};
use lindfrag::linalg::{self, c, C64};
use lindfrag::model::{builtin, BuiltinKind, LindbladModel};
use lindfrag::oracle::{basis_index, build_superoperator, verify_fragmentation};
use lindfrag::spectra::{
    self, eccentricity, poisson_baseline, real_fraction, rmt_samples, spacing_ratios, ComplexSpectrum, MeanEstimate,
    PoissonGeometry, RatioOptions,
};
use lindfrag::tfim::{exceptional_points, obc_spectrum, theta_grid, zero_mode, EpOptions, ModeKind, TfimSpec};
use lindfrag::{Pauli, PauliString};
use proptest::prelude::*;
use proptest::test_runner::TestRunner;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

mod common;
use common::{config, model_from_candidates};

struct Verdict {
    pass: bool,
    detail: String,
}

impl Verdict {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Verdict { pass, detail: detail.into() }
    }
}

type Check = fn() -> Verdict;

fn binomial(n: u32, k: u32) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

fn fragment_counting() -> Verdict {
    let mut notes = Vec::new();
    let mut pass = true;
    for (kind, n, expected) in [
        (BuiltinKind::ClusterY, 4, 144u128),
        (BuiltinKind::ClusterZiz, 4, 144),
        (BuiltinKind::ClusterY, 8, 11664),
        (BuiltinKind::ClusterZiz, 8, 11664),
    ] {
        let out = Command::new(env!("CARGO_BIN_EXE_lindfrag"))
            .args(["fragments", "--builtin", kind.name(), "--n", &n.to_string(), "--histogram"])
            .output()
            .expect("binary runs");
        let rows: Vec<(u32, u128)> = String::from_utf8_lossy(&out.stdout)
            .lines()
            .skip(1)
            .filter_map(|l| l.split_once(','))
            .map(|(k, v)| (k.parse().unwrap(), v.parse().unwrap()))
            .collect();
        let total: u128 = rows.iter().map(|r| r.1).sum();
        let dims: u128 = rows.iter().map(|&(k, v)| v << k).sum();
        let m = n as u32 - 2;
        let sizes_ok = rows.iter().all(|&(k, v)| v == binomial(m, k) * 2u128.pow(m - k) * 16);
        let lib_ok = {
            let t = builtin(kind, n, 1.0, 1.0).unwrap().to_tilde().unwrap();
            count_by_size(&t).unwrap().into_iter().map(|(k, v)| (k as u32, v)).collect::<Vec<_>>() == rows
        };
        let ok = out.status.success() && total == expected && dims == 4u128.pow(n as u32) && sizes_ok && lib_ok;
        pass &= ok;
        notes.push(format!("{} N={n}: {total}", kind.name()));
    }
    Verdict::new(pass, notes.join(", "))
}

/// A valid three-qubit model drawn from a fixed seed.
fn random_model(seed: u64) -> LindbladModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = |rng: &mut ChaCha8Rng| -> Vec<Pauli> { (0..3).map(|_| Pauli::ALL[rng.random_range(0..4)]).collect() };
    let h: Vec<(f64, Vec<Pauli>)> = (0..3).map(|_| (rng.random_range(0.3..1.5), letters(&mut rng))).collect();
    let f: Vec<(f64, Vec<Pauli>)> = (0..3).map(|_| (rng.random_range(0.2..1.0), letters(&mut rng))).collect();
    model_from_candidates(3, &h, &f)
}

fn oracle_blocks() -> Verdict {
    let mut models = vec![
        ("cluster_y", builtin(BuiltinKind::ClusterY, 4, 1.0, 0.7).unwrap()),
        ("cluster_ziz", builtin(BuiltinKind::ClusterZiz, 4, 1.0, 0.7).unwrap()),
    ];
    models.push(("random N=3", random_model(2024)));
    let mut pass = true;
    let mut notes = Vec::new();
    for (name, model) in models {
        let t = model.to_tilde().unwrap();
        let sup = build_superoperator(&t).unwrap();
        let r = verify_fragmentation(&t, &sup).unwrap();
        let ok = r.off_block_norm < 1e-12 && r.max_spectrum_distance() < 1e-10;
        pass &= ok;
        notes.push(format!(
            "{name}: {} blocks, off-block {:.1e}, spectra {:.1e}",
            r.n_fragments,
            r.off_block_norm,
            r.max_spectrum_distance()
        ));
    }
    Verdict::new(pass, notes.join("; "))
}

fn tfim_exactness() -> Verdict {
    let mut worst = 0.0f64;
    let mut momenta_ok = true;
    for (zl, zr) in [(true, true), (true, false), (false, false)] {
        for n in 4..=12 {
            for theta in [0.2, 0.45, 0.5, 0.55, 0.8] {
                let spec = TfimSpec::from_theta(n, theta, zl, zr);
                let Ok(sol) = obc_spectrum(&spec) else {
                    return Verdict::new(false, format!("solver failed at ζ=({zl},{zr}) n={n} θ={theta}"));
                };
                let dense = linalg::eigenvalues(&spec.matrix_c()).unwrap();
                worst = worst.max(linalg::multiset_distance(&sol.energies_sq(), &dense));
                if zl != zr {
                    let m1 = (n - 1) as f64 + 1.0;
                    let mut ks: Vec<f64> =
                        sol.modes.iter().filter(|m| m.kind == ModeKind::Regular).map(|m| m.momentum.re).collect();
                    ks.sort_by(f64::total_cmp);
                    let uniform = ks.len() == n - 1
                        && ks.iter().enumerate().all(|(a, k)| (k - (a + 1) as f64 * PI / m1).abs() < 1e-12)
                        && sol.modes.iter().filter(|m| m.kind == ModeKind::TrivialZero).count() == 1;
                    momenta_ok &= uniform;
                }
            }
        }
    }
    Verdict::new(worst < 1e-8 && momenta_ok, format!("max multiset distance {worst:.1e}, one-edge momenta uniform: {momenta_ok}"))
}

fn zero_mode_transition() -> Verdict {
    let (j, below) = (1.0, 0.2);
    let mut energies = Vec::new();
    let mut last_momentum = c(0.0, 0.0);
    for m in 20..=40 {
        match zero_mode(&TfimSpec::new(m + 1, j, below, true, true)) {
            Ok(Some(z)) => {
                energies.push(z.energy.norm());
                last_momentum = z.momentum;
            }
            _ => return Verdict::new(false, format!("no zero mode at M={m}")),
        }
    }
    let rate = energies.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let limit = c(-PI / 2.0, -(below / j).ln());
    let drift = (last_momentum - limit).norm();

    let above = 1.5;
    let mut im_max = Vec::new();
    let mut persists = false;
    for m in [20, 40, 80] {
        let spec = TfimSpec::new(m + 1, j, above, true, true);
        persists |= zero_mode(&spec).map(|z| z.is_some()).unwrap_or(true);
        let sol = obc_spectrum(&spec).unwrap();
        im_max.push(sol.modes.iter().map(|md| md.momentum.im.abs()).fold(0.0, f64::max));
    }
    let shrinking = im_max.windows(2).all(|w| w[1] < 0.75 * w[0]);
    Verdict::new(
        rate < 1.0 && drift < 1e-3 && !persists && shrinking,
        format!(
            "κ/J=0.2: worst |ε| ratio per site {rate:.3}, |k−k_zm| at M=40 {drift:.1e}; κ/J=1.5: max|Im k| {:.4}/{:.4}/{:.4} at M=20/40/80",
            im_max[0], im_max[1], im_max[2]
        ),
    )
}

fn extremum_counts(n_sites: usize, thetas: &[f64]) -> Vec<usize> {
    thetas
        .iter()
        .map(|&theta| {
            let spec = TfimSpec::from_theta(n_sites, theta, true, true);
            let series = evolve_tfim(&spec, &time_grid(40.0 / spec.j, 800), &EchoOptions::default()).unwrap();
            series.extrema
        })
        .collect()
}

fn exceptional_points_and_echoes() -> Verdict {
    let grid = theta_grid(0.001);
    let odd = exceptional_points(&TfimSpec::from_theta(8, 0.5, true, true), &grid, EpOptions::default()).unwrap();
    let even = exceptional_points(&TfimSpec::from_theta(9, 0.5, true, true), &grid, EpOptions::default()).unwrap();
    let Some(&ep) = odd.iter().min_by(|a, b| (*a - 0.5).abs().total_cmp(&(*b - 0.5).abs())) else {
        return Verdict::new(false, "no exceptional point for M+1=8");
    };
    let thetas: Vec<f64> = (1..100).map(|i| i as f64 * 0.01).collect();
    let odd_counts = extremum_counts(8, &thetas);
    let even_counts = extremum_counts(9, &thetas);
    let at = thetas.iter().position(|&t| t > ep).unwrap_or(thetas.len() - 1).max(1);
    let jump_at_ep = odd_counts[at].abs_diff(odd_counts[at - 1]);
    let even_jump = even_counts.windows(2).map(|w| w[1].abs_diff(w[0])).max().unwrap_or(0);
    Verdict::new(
        (ep - 0.5).abs() < 0.1 && even.is_empty() && jump_at_ep >= 3 && even_jump < 3,
        format!(
            "M+1=8 EP at θ={ep:.6}, extremum jump {jump_at_ep} across it; M+1=9 EPs {}, largest jump {even_jump}",
            even.len()
        ),
    )
}

const CHAOS_SEED: &str = "YZ.....Z.I......ZY";

fn fragment_spectrum(kappa: f64) -> ComplexSpectrum {
    let t = builtin(BuiltinKind::ClusterY, CHAOS_SEED.len(), 1.0, kappa).unwrap().to_tilde().unwrap();
    let f = fragment_of(&t, &parse_seed(CHAOS_SEED).unwrap()).unwrap();
    let g = restrict(&t, &f).unwrap();
    spectra::eigendecompose(g.matrix().unwrap(), false).unwrap()
}

fn chaos_diagnostics() -> Verdict {
    let grid = [0.1, 0.5, 1.0, 2.0, 5.0];
    let spectra: Vec<ComplexSpectrum> = grid.iter().map(|&k| fragment_spectrum(k)).collect();
    let at_j = &spectra[2];
    if at_j.len() != 4096 {
        return Verdict::new(false, format!("fragment has dimension {}", at_j.len()));
    }
    let opts = RatioOptions::default();
    let stats = spacing_ratios(at_j, opts).unwrap();
    let complex = MeanEstimate::from_values(&stats.complex_ratios.iter().map(|z| z.norm()).collect::<Vec<_>>());
    // few eigenvalues are real, so the whole real line is used
    let whole = RatioOptions { keep_fraction: 1.0, ..opts };
    let real_stats = spacing_ratios(at_j, whole).unwrap();
    let real = MeanEstimate::from_values(&real_stats.real_ratios.iter().map(|r| r.abs()).collect::<Vec<_>>());
    let tol = at_j.default_real_tol();
    let n_real = at_j.eigenvalues().iter().filter(|z| spectra::is_real(**z, tol)).count();
    let n_upper = at_j.eigenvalues().iter().filter(|z| !spectra::is_real(**z, tol) && z.im > 0.0).count();
    let line = poisson_baseline(PoissonGeometry::Line, n_real, 200, 11, whole.keep_fraction);
    let plane = poisson_baseline(PoissonGeometry::Plane, n_upper, 100, 12, opts.keep_fraction);
    let (sig_real, sig_complex) = (real.excess_over(&line), complex.excess_over(&plane));
    let fr: Vec<f64> = spectra.iter().map(|s| real_fraction(s, s.default_real_tol())).collect();
    let monotone = fr.windows(2).all(|w| w[1] >= w[0]);
    Verdict::new(
        sig_real > 3.0 && sig_complex > 3.0 && monotone,
        format!(
            "real mean|z| {:.3} vs {:.3} ({sig_real:.1} SE), complex {:.3} vs {:.3} ({sig_complex:.1} SE); f_r over κ/J {grid:?}: {}",
            real.mean,
            line.mean,
            complex.mean,
            plane.mean,
            fr.iter().map(|f| format!("{f:.3}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn rmt_ensemble() -> Verdict {
    let n = 256;
    let chis = [0.0, 0.5, 1.0, 2.0, 4.0];
    let mut exact = true;
    let mut worst_defect = 0.0f64;
    let mut fr = Vec::new();
    let mut ecc = Vec::new();
    for &chi in &chis {
        let samples = rmt_samples(n, chi, 1000, 100).unwrap();
        let mut f_sum = 0.0;
        let mut e_vals = Vec::new();
        for s in &samples {
            exact &= s.is_pseudo_hermitian();
            let spec = s.spectrum().unwrap();
            worst_defect = worst_defect.max(spec.conjugation_defect() / spec.scale().max(1.0));
            let tol = spec.default_real_tol();
            f_sum += real_fraction(&spec, tol);
            if let Ok(e) = eccentricity(&spec, tol) {
                e_vals.push(e);
            }
        }
        fr.push(f_sum / samples.len() as f64);
        ecc.push(MeanEstimate::from_values(&e_vals).mean);
    }
    let increasing = fr.windows(2).all(|w| w[1] > w[0]);
    let dip = ecc.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| chis[i]).unwrap();
    Verdict::new(
        exact && worst_defect < 1e-8 && fr[0] <= 1.0 / n as f64 && increasing && dip == 1.0,
        format!(
            "conjugation defect {worst_defect:.1e}; mean f_r {}; mean eccentricity {}",
            fr.iter().map(|f| format!("{f:.4}")).collect::<Vec<_>>().join(" "),
            ecc.iter().map(|e| format!("{e:.3}")).collect::<Vec<_>>().join(" ")
        ),
    )
}

fn letters(n: usize) -> impl Strategy<Value = Vec<Pauli>> {
    prop::collection::vec(prop::sample::select(Pauli::ALL.to_vec()), n)
}

fn run_property<S: Strategy>(
    name: &str,
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<String, String> {
    TestRunner::new(config(cases)).run(&strategy, test).map(|_| format!("{name} ×{cases}")).map_err(|e| format!("{name}: {e}"))
}

fn invariant_suites() -> Verdict {
    let kinds = || prop::sample::select(vec![BuiltinKind::ClusterY, BuiltinKind::ClusterZiz]);
    let results = [
        run_property("bilinearity", 512, (1usize..=12).prop_flat_map(|n| (letters(n), letters(n), letters(n))), |(a, b, c)| {
            let (a, b, c) = (PauliString::from_paulis(&a), PauliString::from_paulis(&b), PauliString::from_paulis(&c));
            let lhs = a.anticommutes(&b.multiply(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, a.anticommutes(&b).unwrap() ^ a.anticommutes(&c).unwrap());
            Ok(())
        }),
        run_property("fragment closure", 64, (kinds(), (4usize..=10).prop_flat_map(letters)), |(kind, seed)| {
            let t = builtin(kind, seed.len(), 1.0, 1.0).unwrap().to_tilde().unwrap();
            let f = fragment_of(&t, &PauliString::from_paulis(&seed)).unwrap();
            for p in f.members() {
                for h in t.base().hamiltonian() {
                    if h.pauli.anticommutes(&p).unwrap() {
                        prop_assert!(f.contains(&h.pauli.multiply(&p).unwrap().unsigned()));
                    }
                }
            }
            Ok(())
        }),
        run_property("pseudo-Hermitian pairing", 48, ((4usize..=10).prop_flat_map(letters), 0.1f64..2.0), |(seed, kappa)| {
            let t = builtin(BuiltinKind::ClusterY, seed.len(), 1.0, kappa).unwrap().to_tilde().unwrap();
            let f = fragment_of(&t, &PauliString::from_paulis(&seed)).unwrap();
            let values = linalg::eigenvalues(restrict(&t, &f).unwrap().matrix().unwrap()).unwrap();
            let conj: Vec<C64> = values.iter().map(|z| z.conj()).collect();
            let scale = values.iter().map(|z| z.norm()).fold(1.0, f64::max);
            prop_assert!(linalg::multiset_distance(&values, &conj) < 1e-10 * scale);
            Ok(())
        }),
        run_property("|z| ≤ 1", 128, (3usize..=9, any::<u64>()), |(log_n, seed)| {
            let s = spectra::rmt_sample(1 << log_n, 1.0, seed).unwrap().spectrum().unwrap();
            let stats = spacing_ratios(&s, RatioOptions::default()).unwrap();
            prop_assert!(stats.complex_ratios.iter().all(|z| z.norm() <= 1.0 + 1e-15));
            prop_assert!(stats.real_ratios.iter().all(|r| r.abs() <= 1.0 + 1e-15));
            Ok(())
        }),
        run_property("echo normalization", 32, (kinds(), (4usize..=8).prop_flat_map(letters), 0.0f64..2.0), |(kind, seed, kappa)| {
            let t = builtin(kind, seed.len(), 1.0, kappa).unwrap().to_tilde().unwrap();
            let p = PauliString::from_paulis(&seed);
            let f = fragment_of(&t, &p).unwrap();
            let g = restrict(&t, &f).unwrap();
            let mut start = vec![c(0.0, 0.0); g.dim()];
            start[f.index_of(&p).unwrap()] = c(1.0, 0.0);
            let series = evolve_echo(g.matrix().unwrap(), &start, &time_grid(5.0, 50), &EchoOptions::default()).unwrap();
            prop_assert!((series.values[0].norm() - 1.0).abs() < 1e-12);
            Ok(())
        }),
        run_property("L(1) = 0", 32, (2usize..=4).prop_flat_map(|n| {
            (prop::collection::vec((0.2f64..2.0, letters(n)), 1..=n), prop::collection::vec((0.1f64..2.0, letters(n)), 1..=n), Just(n))
        }), |(h, f, n)| {
            let t = model_from_candidates(n, &h, &f).to_tilde().unwrap();
            let sup = build_superoperator(&t).unwrap();
            let col = basis_index(&PauliString::identity(n));
            prop_assert!((0..sup.dim()).all(|i| sup.matrix()[(i, col)].norm() == 0.0));
            Ok(())
        }),
    ];
    let pass = results.iter().all(Result::is_ok);
    let detail = results.iter().map(|r| r.clone().unwrap_or_else(|e| format!("FAILED {e}"))).collect::<Vec<_>>();
    Verdict::new(pass, detail.join(", "))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 8] = [
        ("fragment counting", fragment_counting, Duration::from_secs(1)),
        ("oracle block-diagonalization", oracle_blocks, Duration::from_secs(30)),
        ("TFIM exactness", tfim_exactness, Duration::from_secs(10)),
        ("zero mode and transition", zero_mode_transition, Duration::from_secs(60)),
        ("exceptional points and echo regimes", exceptional_points_and_echoes, Duration::from_secs(120)),
        ("chaos diagnostics", chaos_diagnostics, Duration::from_secs(300)),
        ("RMT ensemble", rmt_ensemble, Duration::from_secs(60)),
        ("invariant suites", invariant_suites, Duration::from_secs(60)),
    ];
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let id = i + 1;
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let verdict = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= *budget;
        let pass = verdict.pass && in_time;
        if !pass {
            failed += 1;
        }
        let timing = if in_time { String::new() } else { format!(" [over budget {budget:?}]") };
        println!(
            "{} criterion {id} {name} ({:.1}s): {}{timing}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            verdict.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
