//! Acceptance gate: one test per numbered criterion.
//!
//! Criteria 4, 7, and 8 quantify over every negative definite tree with at
//! most 8 vertices and weights in [-7, -2]. That census is enumerated once
//! (13.8 million classes) and shared through a `OnceLock`; the per-graph
//! pipeline solves each system in scaled-integer form and falls back to
//! the public rational API on a fixed subsample as a cross-check.

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use resgraph::blowup::{blow_up, verify_transport, BlowUpCenter};
use resgraph::classify::{dynkin_detect, enumerate_graphs, shape, DynkinLabel, LtType, Shape};
use resgraph::cover::{cover_step, ComponentCase, CoverVerdict};
use resgraph::discrepancy::{
    classify_pair, cycle_numbers, discrepancies, fundamental_cycle, rationality_check,
    DiscrepancyProfile, PairClass,
};
use resgraph::format;
use resgraph::graph::{ResolutionGraph, VertexId};
use resgraph::linalg;
use resgraph::{Int, Rational};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

const SWEEP_MAX_VERTICES: usize = 8;
const SWEEP_MIN_WEIGHT: i64 = -7;

fn corpus(name: &str) -> ResolutionGraph {
    let path = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../corpus/{name}.rdg"));
    format::parse(&std::fs::read_to_string(path).unwrap()).unwrap().graph
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(Int::from(n), Int::from(d))
}

fn vid(s: &str) -> VertexId {
    s.parse().unwrap()
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for p in [2u64, 3] {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
    }
    // remaining factors are 6k +- 1
    let mut d = 5;
    let mut step = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += step;
        step = 6 - step;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

struct Sweep {
    total: usize,
    log_terminal: usize,
    wild_pairs: usize,
    fork_branches: usize,
    cross_checks: usize,
    shape_checks: usize,
    dichotomy_violations: Vec<String>,
    rationality_violations: Vec<String>,
    fork_violations: Vec<String>,
    shape_law_violations: Vec<String>,
    elapsed: Duration,
}

static SWEEP: OnceLock<Sweep> = OnceLock::new();

fn sweep() -> &'static Sweep {
    SWEEP.get_or_init(run_sweep)
}

fn describe(g: &ResolutionGraph) -> String {
    let ws: Vec<String> = (0..g.vertex_count()).map(|i| g.self_int(i).to_string()).collect();
    let es: Vec<String> = g.edges().iter().map(|&(i, j)| format!("{i}-{j}")).collect();
    format!("weights [{}], edges [{}]", ws.join(","), es.join(","))
}

const N_CAP: usize = SWEEP_MAX_VERTICES;

/// Discrepancy fractions of a boundary-free tree by leaf elimination.
/// After absorbing its children, vertex v carries the integer equation
/// p*a_v + q*a_parent = s; one division per vertex on the way back down.
/// Returns reduced pairs with positive denominators. Everything stays far
/// inside i128 for this envelope, and the caller re-checks each solution
/// by substitution, so there is no unverified arithmetic here.
fn tree_discrepancies(weights: &[i64], edges: &[(usize, usize)]) -> [(i128, i128); N_CAP] {
    let n = weights.len();
    let mut nbr = [[0usize; N_CAP]; N_CAP];
    let mut deg = [0usize; N_CAP];
    for &(i, j) in edges {
        nbr[i][deg[i]] = j;
        deg[i] += 1;
        nbr[j][deg[j]] = i;
        deg[j] += 1;
    }

    let mut order = [0usize; N_CAP];
    let mut parent = [usize::MAX; N_CAP];
    let mut seen = [false; N_CAP];
    seen[0] = true;
    let mut len = 1;
    let mut head = 0;
    while head < len {
        let v = order[head];
        head += 1;
        for k in 0..deg[v] {
            let u = nbr[v][k];
            if !seen[u] {
                seen[u] = true;
                parent[u] = v;
                order[len] = u;
                len += 1;
            }
        }
    }
    assert_eq!(len, n, "not a connected tree");

    let mut p = [0i128; N_CAP];
    let mut q = [0i128; N_CAP];
    let mut s = [0i128; N_CAP];
    for idx in (0..n).rev() {
        let v = order[idx];
        let w = i128::from(weights[v]);
        let (mut pv, mut qv, mut sv) = (w, 1i128, w + 2);
        for k in 0..deg[v] {
            let c = nbr[v][k];
            if c != parent[v] {
                let held = qv;
                pv = pv * p[c] - held * q[c];
                sv = sv * p[c] - held * s[c];
                qv = held * p[c];
            }
        }
        p[v] = pv;
        q[v] = qv;
        s[v] = sv;
    }

    let mut out = [(0i128, 0i128); N_CAP];
    for idx in 0..n {
        let v = order[idx];
        let (mut num, mut den) = if idx == 0 {
            (s[v], p[v])
        } else {
            let (pn, pd) = out[parent[v]];
            (s[v] * pd - q[v] * pn, p[v] * pd)
        };
        if den < 0 {
            num = -num;
            den = -den;
        }
        let common = num.gcd(&den);
        out[v] = (num / common, den / common);
    }
    out
}

fn run_sweep() -> Sweep {
    let start = Instant::now();
    let mut s = Sweep {
        total: 0,
        log_terminal: 0,
        wild_pairs: 0,
        fork_branches: 0,
        cross_checks: 0,
        shape_checks: 0,
        dichotomy_violations: Vec::new(),
        rationality_violations: Vec::new(),
        fork_violations: Vec::new(),
        shape_law_violations: Vec::new(),
        elapsed: Duration::ZERO,
    };
    let mut en = enumerate_graphs(SWEEP_MAX_VERTICES, SWEEP_MIN_WEIGHT);
    while let Some(t) = en.next_raw() {
        s.total += 1;
        let weights = t.weights();
        let edges = t.edges();
        let n = weights.len();
        let a = tree_discrepancies(weights, edges);
        // log terminal means every coefficient stays below 1
        let lt = a[..n].iter().all(|&(num, den)| num < den);

        // common denominator of the reduced fractions = the index
        let r_wide = a[..n].iter().fold(1_i128, |acc, &(_, den)| acc.lcm(&den));
        let mut y = [0_i128; N_CAP];
        for i in 0..n {
            y[i] = a[i].0 * (r_wide / a[i].1);
        }
        let d = r_wide;

        // certify the solve: substitute back into every row of the system
        let mut acc = [0_i128; N_CAP];
        for i in 0..n {
            let w = i128::from(weights[i]);
            acc[i] = w * y[i] - d * (w + 2);
        }
        for &(i, j) in edges {
            acc[i] += y[j];
            acc[j] += y[i];
        }
        assert!(acc[..n].iter().all(|&v| v == 0), "solve broken on {}", describe(&t.to_graph()));

        // materialize only when some route below needs the graph
        let sampled = s.total % 1024 == 1;
        let shaped = lt || s.total % 64 == 1;
        if !(sampled || shaped) {
            continue;
        }
        let g = t.to_graph();

        if sampled {
            // dual route: the public rational API must agree with the
            // integer tree elimination
            s.cross_checks += 1;
            let profile = discrepancies(&g).unwrap();
            assert_eq!(classify_pair(&profile).is_log_terminal(), lt, "{}", describe(&g));
            for (i, &(num, den)) in a[..n].iter().enumerate() {
                assert_eq!(profile.get(i), &Rational::new(Int::from(num), Int::from(den)), "{}", describe(&g));
            }
        }

        // the classifier law gets every log terminal graph and a fixed
        // sample of the rest; criterion 8 needs the fork structure anyway
        let sh = if shaped {
            let sh = shape(&g).expect("enumerated graphs are boundary-free trees");
            s.shape_checks += 1;
            if lt != (sh.lt_type != LtType::None) {
                s.shape_law_violations.push(describe(&g));
            }
            Some(sh)
        } else {
            None
        };

        if !lt {
            continue;
        }
        s.log_terminal += 1;
        let r = u64::try_from(r_wide).expect("indices in this envelope fit u64");

        // criterion 7: the contracted singularity is rational
        let z = fundamental_cycle(&g).expect("definite graphs have a fundamental cycle");
        let nums = cycle_numbers(&g, &z).unwrap();
        if &nums.z_squared + &nums.z_dot_k >= Int::zero() || !nums.p_a.is_zero() {
            s.rationality_violations.push(describe(&g));
        }

        // criterion 4: wild covers for p >= 5 always step down cleanly
        let wild: Vec<u64> = prime_factors(r).into_iter().filter(|&p| p >= 5).collect();
        if !wild.is_empty() {
            let profile = DiscrepancyProfile::from_coefficients(
                g.ids().cloned().collect(),
                a[..n].iter().map(|&(num, den)| Rational::new(Int::from(num), Int::from(den))).collect(),
            );
            for p in wild {
                s.wild_pairs += 1;
                match cover_step(&g, &profile, p) {
                    Ok(report) => {
                        let clean = report.boundary_reduced
                            && report.verdict == CoverVerdict::StepLogTerminal
                            && report.failing_vertices().is_empty()
                            && report.step_index_after == Some(Int::from(r / p));
                        if !clean {
                            s.dichotomy_violations.push(format!(
                                "{} p={p}: verdict {:?}, index {:?}",
                                describe(&g),
                                report.verdict,
                                report.step_index_after
                            ));
                        }
                    }
                    Err(e) => s.dichotomy_violations.push(format!("{} p={p}: {e}", describe(&g))),
                }
            }
        }

        // criterion 8: fork branch relations in scaled-integer form
        if let Shape::Fork { center, branches } = &sh.as_ref().unwrap().shape {
            let yc = y[g.index_of(center).unwrap()];
            for branch in branches {
                let idx: Vec<usize> = branch.iter().map(|v| g.index_of(v).unwrap()).collect();
                let ws: Vec<i64> = idx.iter().map(|&i| g.self_int(i)).collect();
                let ok = match ws.as_slice() {
                    [-2] => {
                        s.fork_branches += 1;
                        2 * y[idx[0]] == yc
                    }
                    [-3] => {
                        s.fork_branches += 1;
                        3 * y[idx[0]] == yc + d
                    }
                    [-2, -2] => {
                        s.fork_branches += 1;
                        3 * y[idx[0]] == 2 * yc && 3 * y[idx[1]] == yc
                    }
                    _ => true,
                };
                if !ok {
                    s.fork_violations.push(describe(&g));
                }
            }
        }
    }
    s.elapsed = start.elapsed();
    s
}

/// Star graph regression: minors, discrepancies, index, class, cycle.
#[test]
fn criterion_1_star_example_regression() {
    let t = Instant::now();
    let g = corpus("example5-1");
    let m = g.intersection_matrix();
    assert_eq!(
        linalg::leading_principal_minors(&m).unwrap(),
        vec![Int::from(-2), Int::from(3), Int::from(-4), Int::from(8)]
    );
    assert!(linalg::is_negative_definite(&m).unwrap());

    let p = discrepancies(&g).unwrap();
    assert_eq!(
        p.coefficients(),
        &[ratio(1, 2), ratio(1, 4), ratio(1, 4), ratio(1, 2)]
    );
    assert_eq!(p.index(), &Int::from(4));
    assert_eq!(classify_pair(&p), PairClass::LogTerminalNotCanonical);

    let z = fundamental_cycle(&g).unwrap();
    assert_eq!(z.multiplicities(), &[2, 1, 1, 1]);
    let nums = cycle_numbers(&g, &z).unwrap();
    assert_eq!(nums.z_squared, Int::from(-3));
    assert_eq!(nums.z_dot_k, Int::from(1));
    assert!(nums.p_a.is_zero());
    let rat = rationality_check(&g).unwrap();
    assert_eq!(rat.multiplicity, Some(Int::from(3)));

    assert!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
}

/// Five-vertex fork regression, with the fundamental cycle confirmed by an
/// independent brute-force search.
#[test]
fn criterion_2_five_vertex_fork_regression() {
    let t = Instant::now();
    let g = corpus("example5-2");
    let p = discrepancies(&g).unwrap();
    assert_eq!(
        p.coefficients(),
        &[ratio(2, 3), ratio(1, 3), ratio(4, 9), ratio(2, 9), ratio(5, 9)]
    );
    assert_eq!(p.index(), &Int::from(9));
    assert_eq!(classify_pair(&p), PairClass::LogTerminalNotCanonical);

    let sh = shape(&g).unwrap();
    assert_eq!(sh.lt_type, LtType::E6);
    assert_eq!(
        sh.branch_determinants,
        Some([Int::from(2), Int::from(3), Int::from(3)])
    );

    let z = fundamental_cycle(&g).unwrap();
    assert_eq!(z.multiplicities(), &[2, 1, 2, 1, 1]);

    // independent route: smallest positive cycle with all pairings <= 0,
    // found by exhaustive search and pointwise minimum
    let n = g.vertex_count();
    let m = g.intersection_matrix();
    let mut best: Option<Vec<u64>> = None;
    let mut cand = vec![1u64; n];
    loop {
        let pairing_ok = (0..n).all(|i| {
            let s: i64 = (0..n).map(|j| m[(i, j)] * cand[j] as i64).sum();
            s <= 0
        });
        if pairing_ok {
            best = Some(match best {
                None => cand.clone(),
                Some(b) => b.iter().zip(&cand).map(|(&x, &y)| x.min(y)).collect(),
            });
        }
        let mut k = 0;
        loop {
            if k == n {
                break;
            }
            if cand[k] < 4 {
                cand[k] += 1;
                break;
            }
            cand[k] = 1;
            k += 1;
        }
        if k == n {
            break;
        }
    }
    assert_eq!(best.as_deref(), Some(z.multiplicities()));

    let nums = cycle_numbers(&g, &z).unwrap();
    assert_eq!(nums.z_squared, Int::from(-3));
    let rat = rationality_check(&g).unwrap();
    assert!(rat.inequality_holds && rat.p_a.is_zero());
    assert_eq!(rat.multiplicity, Some(Int::from(3)));
    assert!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
}

/// The two worked wild covers that fail, and where they fail: the failing
/// vertex carries a chain-end lower bound of at least 1.
#[test]
fn criterion_3_wild_cover_failures() {
    let t = Instant::now();
    let bound_at = |report: &resgraph::cover::CoverReport, v: &VertexId| -> Rational {
        report
            .cases
            .iter()
            .find_map(|(id, c)| match c {
                ComponentCase::FailEndPattern { lower_bound } if id == v => Some(lower_bound.clone()),
                _ => None,
            })
            .expect("failing vertex is a chain-end failure")
    };
    let one = Rational::new(Int::from(1), Int::from(1));

    let g = corpus("example5-1");
    let p = discrepancies(&g).unwrap();
    let report = cover_step(&g, &p, 2).unwrap();
    assert_eq!(report.verdict, CoverVerdict::NotLogTerminal);
    assert_eq!(report.failing_vertices(), vec![vid("C4")]);
    assert!(!report.boundary_reduced);
    assert!(bound_at(&report, &vid("C4")) >= one);

    let g = corpus("example5-2");
    let p = discrepancies(&g).unwrap();
    let report = cover_step(&g, &p, 3).unwrap();
    assert_eq!(report.verdict, CoverVerdict::NotLogTerminal);
    assert_eq!(report.failing_vertices(), vec![vid("C2")]);
    assert!(bound_at(&report, &vid("C2")) >= one);

    assert!(t.elapsed() < Duration::from_secs(1), "took {:?}", t.elapsed());
}

/// Every wild cover at p >= 5 over the whole envelope steps down to index
/// r/p with all curves in the two good cases, inside the time budget.
#[test]
fn criterion_4_wild_dichotomy_over_the_envelope() {
    let s = sweep();
    assert!(s.dichotomy_violations.is_empty(), "{:?}", &s.dichotomy_violations[..s.dichotomy_violations.len().min(5)]);
    assert!(s.wild_pairs > 10_000, "only {} wild pairs exercised", s.wild_pairs);
    eprintln!(
        "dichotomy: {} wild (graph, prime) pairs over {} graphs ({} log terminal) in {:?}",
        s.wild_pairs, s.total, s.log_terminal, s.elapsed
    );
    assert!(
        s.elapsed < Duration::from_secs(120),
        "sweep took {:?}",
        s.elapsed
    );
}

/// All-(-2) census: exactly the sixteen A/D/E diagrams on up to 8 vertices.
#[test]
fn criterion_5_ade_census() {
    let mut labels: Vec<DynkinLabel> = Vec::new();
    for g in enumerate_graphs(8, -2) {
        let label = dynkin_detect(&g);
        assert_ne!(label, DynkinLabel::None, "{}", describe(&g));
        // each diagram contracts to a canonical singularity
        let p = discrepancies(&g).unwrap();
        assert!(p.coefficients().iter().all(|c| c.is_zero()));
        labels.push(label);
    }
    let mut expect: Vec<DynkinLabel> = (1..=8).map(DynkinLabel::A).collect();
    expect.extend((4..=8).map(DynkinLabel::D));
    expect.extend([DynkinLabel::E6, DynkinLabel::E7, DynkinLabel::E8]);
    assert_eq!(labels.len(), 16);
    for l in expect {
        assert_eq!(labels.iter().filter(|&&x| x == l).count(), 1, "{l:?}");
    }
}

/// Transported profiles along random blow-up sequences over the corpus
/// graphs: verify_transport says yes, a fresh solve agrees exactly, and
/// every coefficient stays below 1 at every step.
#[test]
fn criterion_6_randomized_blow_up_transport() {
    let corpus_dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let mut pool: Vec<ResolutionGraph> = Vec::new();
    let mut names: Vec<std::path::PathBuf> =
        std::fs::read_dir(&corpus_dir).unwrap().map(|e| e.unwrap().path()).collect();
    names.sort();
    for path in names {
        let doc = format::parse(&std::fs::read_to_string(path).unwrap()).unwrap();
        pool.push(doc.graph);
    }
    assert!(pool.len() >= 20, "corpus shrank to {}", pool.len());

    let one = Rational::new(Int::from(1), Int::from(1));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x0dd5eed);
    let mut steps_total = 0usize;
    for _ in 0..1000 {
        let mut g = pool[rng.gen_range(0..pool.len())].clone();
        let mut profile = discrepancies(&g).unwrap();
        assert!(profile.coefficients().iter().all(|a| a < &one));
        for _ in 0..rng.gen_range(1..=6usize) {
            let center = loop {
                match rng.gen_range(0..4) {
                    0 => break BlowUpCenter::FreePoint(g.id(rng.gen_range(0..g.vertex_count())).clone()),
                    1 if g.edge_count() > 0 => {
                        let (i, j) = g.edges()[rng.gen_range(0..g.edge_count())];
                        break BlowUpCenter::EdgePoint(g.id(i).clone(), g.id(j).clone());
                    }
                    2 => {
                        if let Some(i) = (0..g.vertex_count()).find(|&i| g.boundary(i) > 0) {
                            break BlowUpCenter::BoundaryPoint(Some(g.id(i).clone()));
                        }
                    }
                    3 => break BlowUpCenter::BoundaryPoint(None),
                    _ => {}
                }
            };
            assert!(verify_transport(&g, &center).unwrap(), "center {center} on {}", describe(&g));
            let (blown, transported) = blow_up(&g, &profile, &center).unwrap();
            let direct = discrepancies(&blown).unwrap();
            assert_eq!(direct, transported, "center {center} on {}", describe(&g));
            assert_eq!(transported.index(), profile.index());
            assert!(transported.coefficients().iter().all(|a| a < &one));
            g = blown;
            profile = transported;
            steps_total += 1;
        }
    }
    eprintln!("transport: {steps_total} blow-ups across 1000 sequences");
    assert!(steps_total >= 1000);
}

/// Every log terminal graph in the envelope contracts to a rational
/// singularity: Z^2 + Z.K < 0 and arithmetic genus 0.
#[test]
fn criterion_7_rationality_over_the_envelope() {
    let s = sweep();
    assert!(s.rationality_violations.is_empty(), "{:?}", &s.rationality_violations[..s.rationality_violations.len().min(5)]);
    assert!(s.log_terminal > 500_000, "only {} log terminal graphs", s.log_terminal);
}

/// Fork coefficient relations: a (-2)-leaf carries half the center
/// coefficient, a (-3)-leaf a third of center-plus-one, a (-2,-2)-chain
/// two thirds and one third.
#[test]
fn criterion_8_fork_coefficient_relations() {
    let s = sweep();
    assert!(s.fork_violations.is_empty(), "{:?}", &s.fork_violations[..s.fork_violations.len().min(5)]);
    assert!(s.fork_branches > 1_000, "only {} branches matched", s.fork_branches);
}

/// Rides the sweep: a boundary-free tree is log terminal exactly when its
/// shape is a chain or one of the admissible fork patterns.
#[test]
fn shape_law_across_the_envelope() {
    let s = sweep();
    assert!(s.shape_law_violations.is_empty(), "{:?}", &s.shape_law_violations[..s.shape_law_violations.len().min(5)]);
    assert!(s.shape_checks > 1_000_000, "only {} graphs classified", s.shape_checks);
    assert!(s.cross_checks > 10_000);
}
