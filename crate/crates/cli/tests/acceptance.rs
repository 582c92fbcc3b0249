//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use geodecomp::decomp::{
    daggers, dual_decomposition, geometric_decomposition, geometric_decomposition_with_peel,
    unisolvence_check, verify_dagger, DaggerKind,
};
use geodecomp::extension::{extend_family_to_hat, full_extension, ExtensionFamily};
use geodecomp::funcspace::synthesize_presheaf;
use geodecomp::linalg::RatMatrix;
use geodecomp::poset::PeelDirection;
use geodecomp::simplicial::{
    homogeneous_extension, instantiate, local_ops_from_simplicial, simplex_vanishing_basis,
    simplicial_from_local, solve_simpext, SimpextSolution, SimplicialComplex, SimplicialSpace,
};
use geodecomp_cli::{run_with, Settings, EXIT_FAILURE, EXIT_OK};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

/// Name, check, runtime limit in seconds.
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn square() -> SimplicialComplex {
    SimplicialComplex::build(4, &[vec![0, 1, 2], vec![0, 2, 3]]).unwrap()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Consistent family of a simplicial space, built from the reference
/// operators of every dimension below the complex dimension.
fn simplicial_family(complex: &SimplicialComplex, s: SimplicialSpace) -> ExtensionFamily {
    let n = complex.dim().unwrap_or(0);
    let ems: BTreeMap<usize, RatMatrix> = (0..n)
        .filter(|&m| simplex_vanishing_basis(s, m).cols() > 0)
        .map(|m| (m, homogeneous_extension(s, m).unwrap()))
        .collect();
    local_ops_from_simplicial(complex, s, &ems).unwrap()
}

fn hat_family(family: &ExtensionFamily) -> ExtensionFamily {
    let hat = family.space().with_global_top();
    extend_family_to_hat(family, &hat).unwrap()
}

/// Lattice points `x/r` of the mesh with vertex positions `coords`; the
/// number of Lagrange nodes of degree `r`.
fn lagrange_nodes(coords: &[[i64; 2]], cells: &[Vec<usize>], r: i64) -> usize {
    let mut nodes = BTreeSet::new();
    for cell in cells {
        let d = cell.len() - 1;
        let mut alpha = vec![0i64; d + 1];
        fn rec(
            i: usize,
            left: i64,
            alpha: &mut Vec<i64>,
            cell: &[usize],
            coords: &[[i64; 2]],
            nodes: &mut BTreeSet<[i64; 2]>,
        ) {
            if i + 1 == alpha.len() {
                alpha[i] = left;
                let mut p = [0i64; 2];
                for (a, &v) in alpha.iter().zip(cell) {
                    p[0] += a * coords[v][0];
                    p[1] += a * coords[v][1];
                }
                nodes.insert(p);
                return;
            }
            for a in 0..=left {
                alpha[i] = a;
                rec(i + 1, left - a, alpha, cell, coords, nodes);
            }
        }
        rec(0, r, &mut alpha, cell, coords, &mut nodes);
    }
    nodes.len()
}

fn criterion_1() -> Check {
    let complex = SimplicialComplex::simplex(2);
    let s = SimplicialSpace::Lagrange { r: 2 };
    let family = hat_family(&simplicial_family(&complex, s));
    let d = geometric_decomposition(&family).map_err(|e| e.to_string())?;
    ensure(d.is_certified(), || "direct-sum certificate failed".into())?;
    // Homogeneous monomials of degree 2 in 3 variables, and C(r-1, d) bubbles.
    ensure(d.ambient_dim() == binomial(4, 2), || format!("ambient {}", d.ambient_dim()))?;
    for e in 0..complex.faces().len() {
        let got = d.block(e).cols();
        let want = binomial(1, complex.face_dim(e));
        ensure(got == want, || {
            format!("block on {:?} has dim {got}, expected {want}", complex.face(e))
        })?;
    }
    let top = family.space().top().unwrap();
    ensure(d.block(top).cols() == 0, || "hat block is nonzero".into())?;
    let total: usize = d.blocks().values().map(RatMatrix::cols).sum();
    ensure(total == 6, || format!("total {total}"))
}

fn criterion_2() -> Check {
    let complex = square();
    let space = instantiate(SimplicialSpace::Lagrange { r: 3 }, &complex);
    let global = space.assemble_global().dim();
    let vanishing: usize = (0..complex.faces().len())
        .map(|e| space.vanishing_trace(e).dim())
        .sum();
    let nodes = lagrange_nodes(&[[0, 0], [1, 0], [1, 1], [0, 1]], complex.cells(), 3);
    ensure(global == 16 && vanishing == 16 && nodes == 16, || {
        format!("global {global}, Σ vanishing {vanishing}, nodes {nodes}")
    })?;
    let family = hat_family(&simplicial_family(&complex, SimplicialSpace::Lagrange { r: 3 }));
    let d = geometric_decomposition(&family).map_err(|e| e.to_string())?;
    ensure(d.is_certified(), || "certificate failed".into())
}

fn criterion_3() -> Check {
    let complex = square();
    let s = SimplicialSpace::Whitney { k: 1 };
    let family = hat_family(&simplicial_family(&complex, s));
    let d = geometric_decomposition(&family).map_err(|e| e.to_string())?;
    ensure(d.is_certified(), || "certificate failed".into())?;
    let mut edges = BTreeSet::new();
    for cell in complex.cells() {
        for i in 0..cell.len() {
            for j in i + 1..cell.len() {
                edges.insert((cell[i].min(cell[j]), cell[i].max(cell[j])));
            }
        }
    }
    for e in 0..complex.faces().len() {
        let want = usize::from(complex.face_dim(e) == 1);
        ensure(d.block(e).cols() == want, || {
            format!("block on {:?} has dim {}", complex.face(e), d.block(e).cols())
        })?;
    }
    let total: usize = d.blocks().values().map(RatMatrix::cols).sum();
    let global = family.space().dim(family.space().top().unwrap());
    ensure(total == 5 && global == 5 && edges.len() == 5, || {
        format!("total {total}, global {global}, edges {}", edges.len())
    })
}

fn criterion_4() -> Check {
    for k in 1..=2 {
        let s = SimplicialSpace::PolyForms { r: 0, k };
        match solve_simpext(s, k).map_err(|e| e.to_string())? {
            SimpextSolution::Feasible(_) => return Err(format!("{s} at m={k} is feasible")),
            SimpextSolution::Infeasible {
                certificate,
                system,
                rhs,
            } => {
                let y = RatMatrix::from_columns(certificate.len(), &[certificate]).transpose();
                ensure((&y * &system).is_zero(), || format!("yᵀM ≠ 0 for {s}"))?;
                ensure(!(&y * &rhs).is_zero(), || format!("yᵀB = 0 for {s}"))?;
            }
        }
    }
    Ok(())
}

fn criterion_5() -> Check {
    for (mesh, vertices) in [
        ("square.json", 4),
        ("triangle.json", 3),
        ("tetrahedron.json", 4),
        ("mixed.json", 5),
    ] {
        let path = data(mesh);
        let out = run_with(
            ["decompose", "--mesh", path.as_str(), "--space", "lagrange:0"],
            &Settings::default(),
        );
        ensure(out.code == EXIT_FAILURE, || format!("{mesh}: exit {}", out.code))?;
        let expected = format!("dim ℱ(𝒯)=1 < Σ dim ℱ̊(F)={vertices}");
        ensure(out.stdout.contains(&expected), || {
            format!("{mesh}: missing `{expected}` in\n{}", out.stdout)
        })?;
    }
    Ok(())
}

fn criterion_6() -> Check {
    for seed in 0..100u64 {
        let (space, family) = synthesize_presheaf(seed, 20, 6);
        let fail = |what: &str| format!("seed {seed}: {what}");
        ensure(space.poset().len() <= 20, || fail("too many elements"))?;
        ensure(space.verify().map_err(|e| e.to_string())?.is_valid(), || {
            fail("function space")
        })?;
        ensure(family.verify().map_err(|e| e.to_string())?.is_valid(), || {
            fail("family")
        })?;
        let hat = hat_family(&family);
        ensure(hat.verify().map_err(|e| e.to_string())?.is_valid(), || {
            fail("hat family")
        })?;
        let primal = geometric_decomposition(&hat).map_err(|e| e.to_string())?;
        ensure(primal.is_certified(), || fail("geometric decomposition"))?;
        for kind in [DaggerKind::Euclidean, DaggerKind::Projection] {
            let ds = daggers(&hat, kind).map_err(|e| e.to_string())?;
            for (&f, d) in &ds {
                ensure(verify_dagger(hat.space(), f, d).is_valid(), || {
                    fail(&format!("{kind:?} dagger on {f}"))
                })?;
            }
            let dual = dual_decomposition(&hat, &ds).map_err(|e| e.to_string())?;
            ensure(dual.is_certified(), || fail(&format!("{kind:?} dual decomposition")))?;
            let uni = unisolvence_check(&primal, &dual).map_err(|e| e.to_string())?;
            ensure(uni.is_certified(), || fail(&format!("{kind:?} unisolvence")))?;
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let spaces = [1, 2, 3]
        .map(|r| SimplicialSpace::Lagrange { r })
        .into_iter()
        .chain([0, 1, 2].map(|k| SimplicialSpace::Whitney { k }));
    for s in spaces {
        for n in 1..=3 {
            let complex = SimplicialComplex::simplex(n);
            let family = simplicial_family(&complex, s);
            let full = full_extension(&family).map_err(|e| e.to_string())?;
            let space = family.space();
            ensure(full.certify(space).is_valid(), || format!("{s} on simplex({n})"))?;
            // Meets computed from vertex sets.
            let faces = complex.faces().len();
            let verts = |e: usize| complex.face(e).iter().copied().collect::<BTreeSet<_>>();
            let find = |set: &BTreeSet<usize>| (0..faces).find(|&e| verts(e) == *set);
            let p = space.poset();
            for g in 0..faces {
                for f in p.upper_bounds(g) {
                    let id = space.trace(g, f) * full.op(g, f);
                    ensure(id == RatMatrix::identity(space.dim(g)), || {
                        format!("{s}: tr E is not the identity on {:?}", complex.face(g))
                    })?;
                }
            }
            for t in 0..faces {
                for g in p.lower_bounds(t) {
                    for f in p.lower_bounds(t) {
                        let lhs = space.trace(g, t) * full.op(f, t);
                        let meet: BTreeSet<usize> = verts(f).intersection(&verts(g)).copied().collect();
                        let ok = match find(&meet) {
                            None => lhs.is_zero(),
                            Some(k) => lhs == full.op(k, g) * space.trace(k, f),
                        };
                        ensure(ok, || {
                            format!(
                                "{s} on simplex({n}): identity fails for F={:?}, G={:?}, T={:?}",
                                complex.face(f),
                                complex.face(g),
                                complex.face(t)
                            )
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_8() -> Check {
    let mut cases: Vec<(SimplicialSpace, usize)> = Vec::new();
    for r in 1..=3 {
        for m in 0..=2 {
            cases.push((SimplicialSpace::Lagrange { r }, m));
        }
    }
    for k in 0..=2 {
        cases.push((SimplicialSpace::Whitney { k }, k));
    }
    for (s, m) in cases {
        let complex = SimplicialComplex::simplex(m + 1);
        let family = simplicial_family(&complex, s);
        let expected = homogeneous_extension(s, m).map_err(|e| e.to_string())?;
        let got = simplicial_from_local(&complex, s, &family, m).map_err(|e| e.to_string())?;
        ensure(got == expected, || format!("{s} at m={m}: round trip differs"))?;
    }
    Ok(())
}

fn criterion_9() -> Check {
    let family = hat_family(&simplicial_family(&square(), SimplicialSpace::Lagrange { r: 2 }));
    let p = family.space().poset();
    let reference = geometric_decomposition(&family).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(0x9ee1);
    let mut seen = BTreeSet::new();
    for _ in 0..10 {
        let order = p.random_peel(PeelDirection::Down, &mut rng);
        ensure(p.is_valid_peel(&order, PeelDirection::Down), || "invalid peel".into())?;
        seen.insert(order.clone());
        let d = geometric_decomposition_with_peel(&family, &order).map_err(|e| e.to_string())?;
        ensure(d.is_certified(), || format!("peel {order:?} not certified"))?;
        for e in p.elements() {
            let (a, b) = (reference.block(e), d.block(e));
            let joint = RatMatrix::hstack(a.rows(), &[a, b]).map_err(|e| e.to_string())?;
            ensure(a.cols() == b.cols() && joint.rank() == a.cols(), || {
                format!("block {} differs under peel {order:?}", p.name(e))
            })?;
        }
    }
    ensure(seen.len() > 1, || "all peels coincide".into())
}

fn cli_square() -> Check {
    let path = data("square.json");
    let out = run_with(
        ["decompose", "--mesh", path.as_str(), "--space", "lagrange:2"],
        &Settings::default(),
    );
    ensure(out.code == EXIT_OK, || format!("exit {}\n{}", out.code, out.stdout))?;
    ensure(out.stdout.contains("global dimension: 9"), || out.stdout.clone())
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 lagrange:2 on one triangle", criterion_1, 1),
        ("2 lagrange:3 on the square", criterion_2, 5),
        ("3 whitney:1 on the square", criterion_3, 5),
        ("4 constant forms admit no extension", criterion_4, 1),
        ("5 piecewise constants have no local basis", criterion_5, 1),
        ("6 100 synthetic presheaves", criterion_6, 60),
        ("7 full extension identities", criterion_7, 30),
        ("8 simplicial round trip", criterion_8, 10),
        ("9 peel-order independence", criterion_9, 10),
        ("cli decompose on the square", cli_square, 5),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed < Duration::from_secs(limit), || {
                format!("took {elapsed:?}, limit {limit} s")
            })
        });
        match result {
            Ok(()) => println!("PASS  {name}  ({:.3} s)", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}  ({:.3} s): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
