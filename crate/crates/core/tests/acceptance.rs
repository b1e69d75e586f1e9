//! Acceptance suite: one PASS/FAIL line per criterion, written straight to
//! stdout so it shows up without `--nocapture`.

use std::io::Write;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrclab::bounds::{self, gv_threshold_with_grid, paper_affine_check, paper_threshold, table_errata};
use lrclab::distance::{
    self, construct_h, degree_lower_bound, exhaustive_min_distance, sampled_weight_floor, weight_of_factored,
    ConstructedH, DistanceError, FactoredCodeword, HVariant,
};
use lrclab::evalcode::{weight, ErasurePattern, EvalCode};
use lrclab::linalg::{rank, Matrix};
use lrclab::presets::{distance_report, DistanceOptions, Preset};
use lrclab::structure::{self, CheckStatus, PropositionId};
use lrclab::tower::TowerSpec;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn build(name: &str) -> Result<(Preset, EvalCode), String> {
    let p = Preset::parse(name).map_err(|e| e.to_string())?;
    let c = p.build().map_err(|e| e.to_string())?;
    Ok((p, c))
}

fn in_code(code: &EvalCode, word: &[u32]) -> bool {
    let mut rows: Vec<Vec<u32>> = code.basis_matrix().iter_rows().map(<[u32]>::to_vec).collect();
    rows.push(word.to_vec());
    rank(code.field(), &Matrix::from_rows(&rows)) == code.dimension()
}

fn all_messages(code: &EvalCode) -> impl Iterator<Item = Vec<u32>> + '_ {
    let size = code.field().size();
    let k = code.dimension() as u32;
    (0..size.pow(k)).map(move |mut x| {
        (0..k)
            .map(|_| {
                let d = (x % size) as u32;
                x /= size;
                d
            })
            .collect()
    })
}

fn criterion_1() -> Outcome {
    let (_, code) = build("f4-rem42a")?;
    let d = exhaustive_min_distance(&code, 1 << 20).map_err(|e| e.to_string())?;
    let places = code.places();
    let mut checked = 0;
    for msg in all_messages(&code) {
        let w = code.encode(&msg).map_err(|e| e.to_string())?;
        for a in 0..code.len() {
            for b in a + 1..code.len() {
                let (pa, pb) = (&places.get(a).coords, &places.get(b).coords);
                if pa[..2] == pb[..2] {
                    ensure(w[a] == w[b], || format!("codeword {msg:?} differs on the fiber {a}, {b}"))?;
                }
            }
        }
        checked += 1;
    }
    let got = (code.len(), code.dimension(), d.d_lower, d.exact, code.locality(), checked);
    ensure(got == (8, 4, 2, true, 1, 256), || format!("(n, k, d, exact, r, words) = {got:?}"))?;
    Ok("n=8 k=4 d=2 r=1, 256 codewords constant on fibers".into())
}

fn criterion_2() -> Outcome {
    let (p, code) = build("f8-prop44")?;
    ensure((code.len(), code.dimension(), code.locality()) == (24, 10, 1), || {
        format!("(n, k, r) = {:?}", (code.len(), code.dimension(), code.locality()))
    })?;
    let bound = degree_lower_bound(&code).map_err(|e| e.to_string())?;
    let witness = p.witness(&code).map_err(|e| e.to_string())?.ok_or("no witness")?;
    let fw = weight_of_factored(&code, &witness).map_err(|e| e.to_string())?;
    ensure(bound.value == 4 && fw.zeros == 20 && fw.weight == 4, || {
        format!("degree bound {}, witness zeros {} weight {}", bound.value, fw.zeros, fw.weight)
    })?;
    let exact = exhaustive_min_distance(&code, distance::DEFAULT_BUDGET).map_err(|e| e.to_string())?;
    ensure(exact.exact && exact.d_lower == 4, || format!("exhaustive d = {}", exact.d_lower))?;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let msg: Vec<u32> = (0..code.dimension()).map(|_| rng.gen_range(0..8)).collect();
    let word = code.encode(&msg).map_err(|e| e.to_string())?;
    for i in 0..code.len() {
        let fiber = code.repair_index().fiber(i);
        ensure(fiber.len() == 1, || format!("position {i} has recovery set {fiber:?}"))?;
        let got = code.repair(&ErasurePattern::single(&word, i)).map_err(|e| e.to_string())?;
        ensure(got == word[i], || format!("repair of {i} gave {got}"))?;
    }
    Ok("n=24 k=10, exhaustive d=4 over 2^30 codewords, degree bound 4, 20-zero codeword, 24 repairs with r=1".into())
}

fn criterion_3() -> Outcome {
    let (p, code) = build("f8-prop45")?;
    ensure((code.len(), code.dimension()) == (48, 20), || format!("(n, k) = ({}, {})", code.len(), code.dimension()))?;
    let witness = p.witness(&code).map_err(|e| e.to_string())?.ok_or("no witness")?;
    ensure(witness.factors.iter().map(|f| f.1.len()).sum::<usize>() == 6, || "witness is not 6 factors".into())?;
    let fw = weight_of_factored(&code, &witness).map_err(|e| e.to_string())?;
    let expanded = factored_word(&code, &witness)?;
    ensure(fw.zeros == 44 && fw.weight == 4 && weight(&expanded) == 4 && in_code(&code, &expanded), || {
        format!("witness zeros {} weight {}", fw.zeros, fw.weight)
    })?;
    let bound = degree_lower_bound(&code).map_err(|e| e.to_string())?;
    ensure(bound.value == 0, || format!("degree bound {}", bound.value))?;
    let floor = sampled_weight_floor(&code, 1_000_000, 45).ok_or("no sample drawn")?;
    ensure(floor >= 4, || format!("sampled a codeword of weight {floor}"))?;
    Ok(format!("n=48 k=20, 44-zero codeword of weight 4, degree bound 0, sampled floor {floor} over 10^6 trials"))
}

fn factored_word(code: &EvalCode, f: &FactoredCodeword) -> Result<Vec<u32>, String> {
    let coeffs = distance::expand_factored(code, f).map_err(|e| e.to_string())?;
    code.evaluate_coefficients(&coeffs).map_err(|e| e.to_string())
}

fn check_h(code: &EvalCode, h: &ConstructedH) -> Result<(), String> {
    let word = factored_word(code, &h.codeword())?;
    ensure(weight(&word) as u64 == h.weight, || format!("expanded weight {} vs {}", weight(&word), h.weight))?;
    ensure(in_code(code, &word), || "h is not a codeword".into())
}

fn h_weight(code: &EvalCode, variant: HVariant) -> Result<Result<u64, (String, u64)>, String> {
    match construct_h(code, variant) {
        Ok(h) => {
            check_h(code, &h)?;
            Ok(Ok(h.weight))
        }
        Err(DistanceError::Construction(e)) => {
            let fallback = e.fallback.as_ref().ok_or_else(|| e.to_string())?;
            check_h(code, fallback)?;
            Ok(Err((e.detail.clone(), fallback.weight)))
        }
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_4() -> Outcome {
    let (_, code) = build("gs-thm34-q8")?;
    ensure((code.len(), code.dimension(), code.locality()) == (3584, 1400, 7), || {
        format!("(n, k, r) = {:?}", (code.len(), code.dimension(), code.locality()))
    })?;
    let bound = degree_lower_bound(&code).map_err(|e| e.to_string())?.value;
    let w = h_weight(&code, HVariant::Thm34)?.map_err(|(d, w)| format!("construction failed ({d}); weight {w}"))?;
    ensure(w == 1216 && bound == 1216, || format!("weight {w}, degree bound {bound}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let start = Instant::now();
    for _ in 0..100 {
        let msg: Vec<u32> = (0..code.dimension()).map(|_| rng.gen_range(0..64)).collect();
        let word = code.encode(&msg).map_err(|e| e.to_string())?;
        for _ in 0..50 {
            let i = rng.gen_range(0..code.len());
            ensure(code.repair_index().fiber(i).len() == 7, || format!("position {i} recovery set size"))?;
            let got = code.repair(&ErasurePattern::single(&word, i)).map_err(|e| e.to_string())?;
            ensure(got == word[i], || format!("repair of {i} failed"))?;
        }
    }
    Ok(format!("n=3584 k=1400, h of weight 1216 = degree bound, d=1216; 5000 repairs with r=7 in {:.2?}", start.elapsed()))
}

fn criterion_5() -> Outcome {
    let (_, code) = build("gs-thm36-q8")?;
    ensure(code.dimension() == 1848, || format!("k = {}", code.dimension()))?;
    let bound = degree_lower_bound(&code).map_err(|e| e.to_string())?.value;
    let p = bounds::RatePoint::new("thm36", code.len() as u64, code.dimension() as u64, 704, 7);
    let a = paper_affine_check(8, &p);
    ensure(a.lhs == Ratio::new(44, 64) && a.rhs == Ratio::new(42, 64) && a.holds, || format!("affine {a:?}"))?;
    ensure(p.rate() > paper_threshold(7, 8, p.delta()).unwrap(), || "strict inequality fails".into())?;
    match h_weight(&code, HVariant::Thm36)? {
        Ok(w) if w == 704 && bound == 704 => Ok("k=1848, h of weight 704 = degree bound; 44/64 > 42/64".into()),
        Ok(w) => Err(format!("h has weight {w}, degree bound {bound}")),
        Err((detail, w)) => Err(format!(
            "k=1848 and 44/64 > 42/64 hold, degree bound {bound}, but no h of weight 704: {detail}; best h found has weight {w}"
        )),
    }
}

fn criterion_6() -> Outcome {
    let mut failures = Vec::new();
    for l in 1..=32u64 {
        let (_, code) = build(&format!("gs-cor38-q8-l{l}"))?;
        ensure(code.dimension() as u64 == (l + 1) * 56, || format!("l={l}: k = {}", code.dimension()))?;
        let target = 64 * (43 - l);
        let p = bounds::RatePoint::new("cor38", 3584, (l + 1) * 56, target, 7);
        ensure(p.rate() > paper_threshold(7, 8, p.delta()).unwrap(), || format!("l={l}: inequality fails"))?;
        match h_weight(&code, HVariant::Cor38 { l: l as u32 })? {
            Ok(w) if w == target => {}
            Ok(w) => failures.push(format!("l={l}: weight {w} != {target}")),
            Err((_, w)) => failures.push(format!("l={l}: no h, best weight {w} vs {target}")),
        }
    }
    if failures.is_empty() {
        Ok("ranks (l+1)*56, weights 64(43-l), inequality strict for l=1..32".into())
    } else {
        Err(format!("ranks and inequality hold for all 32; weight fails for {}: {}", failures.len(), failures.join("; ")))
    }
}

fn criterion_7() -> Outcome {
    let r8 = structure::verify_all(8).map_err(|e| e.to_string())?;
    ensure(r8.len() == 9 && r8.iter().all(|r| r.status == CheckStatus::Passed), || "q=8 suite has a failure".into())?;
    let r32 = structure::verify_all(32).map_err(|e| e.to_string())?;
    for id in [
        PropositionId::TraceFibers,
        PropositionId::NormFibers,
        PropositionId::JointFibers,
        PropositionId::ColorPartition,
        PropositionId::SelfColor,
    ] {
        let r = r32.iter().find(|r| r.proposition_id == id).ok_or_else(|| format!("{} not run at q=32", id.name()))?;
        ensure(r.status == CheckStatus::Passed, || format!("{} at q=32: {:?}", id.name(), r.status))?;
    }
    let sc = r32.iter().find(|r| r.proposition_id == PropositionId::SelfColor).unwrap();
    ensure(sc.measured["solutions"] == 62, || format!("selfColor solutions {}", sc.measured["solutions"]))?;
    Ok(format!("q=8: 9/9; q=32: {} checks pass, selfColor has 62 solutions", r32.len()))
}

fn criterion_8() -> Outcome {
    let tower = std::sync::Arc::new(TowerSpec::quadratic_f8());
    let g = tower.split_graph().map_err(|e| e.to_string())?;
    ensure(g.vertices.len() == 6, || format!("{} vertices", g.vertices.len()))?;
    for &v in &g.vertices {
        ensure(g.out_degree(v) == 2 && g.in_degree(v) == 2, || format!("degrees at {v}"))?;
    }
    ensure(g.self_loops().len() == 3, || format!("{} self-loops", g.self_loops().len()))?;
    ensure(g.connected_within(3), || "some ordered pair needs more than 3 steps".into())?;
    let places = tower.enumerate_places(3, 1 << 12).map_err(|e| e.to_string())?;
    ensure(places.len() == 48, || format!("{} places at depth 3", places.len()))?;
    // a place is a walk x_0 -> x_1 -> x_2 -> x_3, so x_i = b on 2^(3-i) times
    // the number of length-i walks ending at b
    for i in 0..=3usize {
        for &b in &g.vertices {
            let zeros = places.places().iter().filter(|p| p.coords[i] == b).count() as u64;
            let walks: u64 = g.paths_of_length(i, b).iter().map(|&(_, c)| c).sum();
            ensure(zeros == walks << (3 - i), || format!("x_{i} = {b}: {zeros} places, {walks} walks"))?;
        }
    }
    Ok("6 vertices of in/out-degree 2, 3 self-loops, diameter <= 3, walk counts match 48 places".into())
}

fn criterion_9() -> Outcome {
    let rows = bounds::table_rows(8);
    let expected: [(i64, i64, i64, i64, i64, i64); 5] =
        [(1, 4, 1, 4, 1, 8), (1, 4, 1, 2, 1, 8), (1, 4, 1, 2, 1, 8), (1, 6, 5, 12, 1, 24), (1, 12, 5, 12, 1, 48)];
    for (row, e) in rows[2..].iter().zip(expected) {
        let got = (row.delta(), row.rate(), row.r_over_n());
        let want = (Ratio::new(e.0 as i128, e.1 as i128), Ratio::new(e.2 as i128, e.3 as i128), Ratio::new(e.4 as i128, e.5 as i128));
        ensure(got == want, || format!("{}: {got:?}", row.label))?;
    }
    let (t34, t36) = (&rows[0], &rows[1]);
    ensure(t34.rate() == Ratio::new(25, 64) && t34.r_over_n() == Ratio::new(1, 512), || "thm34 R or r/n".into())?;
    ensure(t36.rate() == Ratio::new(33, 64) && t36.r_over_n() == Ratio::new(1, 512), || "thm36 R or r/n".into())?;
    ensure(t34.delta() == Ratio::new(19, 56) && t36.delta() == Ratio::new(11, 56), || "GS delta".into())?;
    for c in bounds::compare_table(8) {
        ensure(c.rate_matches && c.r_over_n_matches, || format!("{} differs from the printed table", c.label))?;
    }
    let errata = table_errata(8);
    ensure(errata.iter().any(|e| e.contains("q^4 - q^2")), || "length erratum missing".into())?;
    ensure(errata.iter().any(|e| e.starts_with("prop41")), || "prop41 erratum missing".into())?;
    let rows = bounds::scatter(&bounds::table_rows(8), 8).map_err(|e| e.to_string())?;
    ensure(bounds::scatter_csv(&rows).lines().count() == 9, || "csv row count".into())?;
    let mut worst = 0f64;
    for &(r, q, d) in &[(31u64, 32u64, 0.5f64), (7, 8, 0.2), (7, 8, 11.0 / 56.0), (1, 8, 0.25)] {
        let a = gv_threshold_with_grid(r, q, d, 1e-9, 10_000).map_err(|e| e.to_string())?.rate;
        let b = gv_threshold_with_grid(r, q, d, 1e-9, 100_000).map_err(|e| e.to_string())?.rate;
        worst = worst.max((a - b).abs());
    }
    ensure(worst < 1e-6, || format!("gv moves by {worst:e} under refinement"))?;
    Ok(format!("7 rows exact, {} errata flagged, gv refinement shift {worst:.1e}", errata.len()))
}

fn criterion_10() -> Outcome {
    let mut lines = Vec::new();
    for j in 2..=6u32 {
        for suffix in ["", "-l0"] {
            let name = format!("f4-prop41-j{j}{suffix}");
            let (p, code) = build(&name)?;
            let (n, k, r) = (code.len() as u64, code.dimension() as u64, code.locality() as u64);
            let want_k = if suffix.is_empty() { 1u64 << j } else { 1 << (j - 1) };
            ensure(n == 1 << (j + 1) && k == want_k && r == 1, || format!("{name}: (n, k, r) = ({n}, {k}, {r})"))?;
            let witness = p.witness(&code).map_err(|e| e.to_string())?.ok_or("no witness")?;
            let upper = weight_of_factored(&code, &witness).map_err(|e| e.to_string())?.weight;
            let (lower, exact) = if j <= 4 {
                let rep = exhaustive_min_distance(&code, 1 << 33).map_err(|e| e.to_string())?;
                (rep.d_lower, rep.exact)
            } else {
                let opts = DistanceOptions { budget: 0, certificate_budget: 1 << 22, ..Default::default() };
                let rep = distance_report(&p, &code, &opts).map_err(|e| e.to_string())?;
                (rep.d_lower, rep.exact)
            };
            ensure(j > 4 || exact, || format!("{name}: exhaustive search not exact"))?;
            ensure(lower <= upper, || format!("{name}: lower {lower} above witness {upper}"))?;
            // locality bound d <= n - k - ceil(k/r) + 2
            ensure(upper + k + k.div_ceil(r) <= n + 2, || format!("{name}: d = {upper} violates the locality bound"))?;
            let d = if lower == upper { format!("{lower}") } else { format!("{lower}..{upper}") };
            lines.push(format!("j={j}{suffix}: [{n},{k},{d}]"));
        }
    }
    Ok(format!(
        "r=1 throughout; statement reading [2^j,2^(j-2),2], proof reading [2^j,2^(j-1),2^(j-1)]; measured {}",
        lines.join(" ")
    ))
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("F_4 code (1,1)", criterion_1),
        ("F_8 code (4,1)", criterion_2),
        ("F_8 code (4,1,1)", criterion_3),
        ("GS q=8 box (24,7,6)", criterion_4),
        ("GS q=8 box (32,7,6)", criterion_5),
        ("GS q=8 sweep l=1..32", criterion_6),
        ("structure checks", criterion_7),
        ("F_8 splitting digraph", criterion_8),
        ("rate table", criterion_9),
        ("F_4 depth sweep j=2..6", criterion_10),
    ];
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = f();
        let took: Duration = start.elapsed();
        let (tag, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        writeln!(out, "{tag} {:>2} {name} [{took:.2?}]: {detail}", i + 1).unwrap();
        out.flush().unwrap();
        if result.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
