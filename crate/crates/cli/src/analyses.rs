//! Analysis drivers: each one turns a built family member into a JSON report
//! plus a flat summary map used for the text table and the expectation checks.

use std::collections::BTreeMap;

use confhol_core::berger::{berger_check, berger_check_with};
use confhol_core::curvature::{self, symmetry_residuals, CurvatureData};
use confhol_core::geometry::Point;
use confhol_core::kform::{stabilizer_check, KForm, RingMatrix};
use confhol_core::lie::{invariant_subspaces, joint_kernel, IndefiniteForm};
use confhol_core::models;
use confhol_core::recognize;
use confhol_core::tractor::gram_matrix;
use confhol_core::transport::{
    ambrose_singer_samples, estimate_holonomy, screen_blocks, span_algebra, transport_tangent,
    EnsembleOptions, TransportMode,
};
use confhol_core::waves;
use confhol_core::zoo::{self, Spacetime, SpacetimeSpec};
use confhol_core::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::config::{Analysis, RunConfig};

pub struct AnalysisOutput {
    pub report: Value,
    pub summary: BTreeMap<String, Value>,
}

pub fn run_analysis(
    analysis: Analysis,
    st: &Spacetime,
    cfg: &RunConfig,
    tol_scale: f64,
) -> Result<AnalysisOutput> {
    let mut summary = BTreeMap::new();
    let report = match analysis {
        Analysis::Curvature => curvature_report(st, cfg, &mut summary)?,
        Analysis::Recognize => recognize_report(st, cfg, tol_scale, &mut summary)?,
        Analysis::TractorHolonomy => {
            holonomy_report(st, cfg, TransportMode::Tractor, tol_scale, &mut summary)?
        }
        Analysis::TangentHolonomy => {
            holonomy_report(st, cfg, TransportMode::Tangent, tol_scale, &mut summary)?
        }
        Analysis::ScreenHolonomy => screen_report(st, cfg, &mut summary)?,
        Analysis::AmbientCompare => ambient_report(st, cfg, &mut summary)?,
        Analysis::Berger => berger_report(st, cfg, &mut summary)?,
        Analysis::PlaneWaveSections => sections_report(st, cfg, &mut summary)?,
        Analysis::ClassifyInvariants => classify_report(st, cfg, &mut summary)?,
        Analysis::CounterexampleIsoL => counterexample_report(cfg, &mut summary)?,
    };
    Ok(AnalysisOutput { report, summary })
}

fn ensemble_options(cfg: &RunConfig) -> EnsembleOptions {
    EnsembleOptions {
        n_random: cfg.options.n_random_loops,
        n_lasso: cfg.options.n_lasso,
        seed: cfg.seed,
        rtol: cfg.tolerances.rtol,
        atol: cfg.tolerances.atol,
        svd_threshold: cfg.tolerances.svd_threshold,
        ..EnsembleOptions::default()
    }
}

fn points(st: &Spacetime, cfg: &RunConfig) -> Vec<Point> {
    let chart = st.metric.chart().clone();
    let bounded = chart.domain().iter().all(|b| b.is_some());
    if bounded {
        chart.sample_points(cfg.sample_points, 0.12)
    } else {
        // Around the family base point; deterministic low-discrepancy shifts.
        let base = st.default_base_point();
        let d = chart.dim();
        (0..cfg.sample_points)
            .map(|k| {
                let mut coords = base.coords().to_vec();
                for (i, c) in coords.iter_mut().enumerate() {
                    let u = ((0.5 + 0.754_877_666_2 * (k * d + i + 1) as f64) % 1.0) - 0.5;
                    match chart.domain()[i] {
                        Some((lo, hi)) => *c = 0.5 * (lo + hi) + 0.7 * u * 0.5 * (hi - lo),
                        None => *c += 1.4 * u,
                    }
                }
                Point::new(chart.clone(), coords).expect("sample point")
            })
            .collect()
    }
}

fn curvature_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let pts = points(st, cfg);
    let mut per_point = Vec::new();
    let mut worst_sym = 0.0f64;
    for p in &pts {
        let data = CurvatureData::new(&st.metric, p)?;
        let sym = symmetry_residuals(&data);
        worst_sym = worst_sym.max(sym.max());
        per_point.push(json!({
            "coords": p.coords(),
            "scalar": data.scalar,
            "riemann_max": data.riemann.max_abs(),
            "ricci_max": data.ricci.amax(),
            "weyl_max": data.weyl.as_ref().map(|w| w.max_abs()),
            "cotton_max": data.cotton.as_ref().map(|c| c.max_abs()),
            "symmetry_residuals": serde_json::to_value(&sym).unwrap(),
        }));
    }
    let einstein = curvature::is_einstein(&st.metric, &pts)?;
    let c_space = curvature::is_c_space(&st.metric, &pts)?;
    summary.insert("curvature.einstein".into(), json!(einstein.verdict));
    summary.insert("curvature.c_space".into(), json!(c_space.verdict));
    summary.insert("curvature.max_symmetry_residual".into(), json!(worst_sym));

    // Full tensors at the base point for downstream consumers.
    let base = st.default_base_point();
    let data = CurvatureData::new(&st.metric, &base)?;
    let d = data.dim;
    let mut riemann = Vec::new();
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let v = data.riemann.at(i, j, k, l);
                    if v.abs() > 1e-14 {
                        riemann.push(json!([i, j, k, l, v]));
                    }
                }
            }
        }
    }
    Ok(json!({
        "points": per_point,
        "is_einstein": serde_json::to_value(&einstein).unwrap(),
        "is_c_space": serde_json::to_value(&c_space).unwrap(),
        "base_point": base.coords(),
        "base_scalar": data.scalar,
        "base_riemann_nonzero": riemann,
    }))
}

fn recognize_report(
    st: &Spacetime,
    cfg: &RunConfig,
    tol_scale: f64,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    if st.recurrent.is_none() {
        return Err(Error::NoRecurrentField);
    }
    let pts = points(st, cfg);
    let mut blocks = Vec::new();
    let mut pp_ok = true;
    let mut pr_ok = true;
    let mut iso_ok = true;
    let mut consistent = true;
    for p in &pts {
        let trace = recognize::pp_trace_condition(st, p)?;
        let pr = recognize::pr_condition(st, p)?;
        let iso = recognize::ricci_isotropy(st, p)?;
        let eq = recognize::equivalence_battery(st, p)?;
        pp_ok &= trace.residual < trace.threshold * tol_scale;
        pr_ok &= pr.screen_residual < pr.threshold * tol_scale;
        iso_ok &= iso.perp_residual < iso.threshold * tol_scale;
        consistent &= eq.all_consistent;
        blocks.push(json!({
            "coords": p.coords(),
            "trace_condition": serde_json::to_value(&trace).unwrap(),
            "screen_to_null": serde_json::to_value(&pr).unwrap(),
            "ricci_isotropy": serde_json::to_value(&iso).unwrap(),
            "equivalences": serde_json::to_value(&eq).unwrap(),
        }));
    }
    let parallelizable = if pr_ok {
        match recognize::parallelizability(st, &pts) {
            Ok(rep) => Some(serde_json::to_value(&rep).unwrap()),
            Err(Error::NotPrWave(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let subbundle = if iso_ok {
        Some(serde_json::to_value(&recognize::subbundle_invariance(st, &pts)?).unwrap())
    } else {
        None
    };
    summary.insert("recognize.pp_trace".into(), json!(pp_ok));
    summary.insert("recognize.screen_to_null".into(), json!(pr_ok));
    summary.insert("recognize.ricci_isotropic".into(), json!(iso_ok));
    summary.insert("recognize.equivalences_consistent".into(), json!(consistent));
    Ok(json!({
        "points": blocks,
        "parallelizability": parallelizable,
        "subbundle_invariance": subbundle,
    }))
}

fn holonomy_report(
    st: &Spacetime,
    cfg: &RunConfig,
    mode: TransportMode,
    tol_scale: f64,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let base = st.default_base_point();
    let opts = ensemble_options(cfg);
    let est = estimate_holonomy(&st.metric, &base, mode, &opts)?;
    let prefix = match mode {
        TransportMode::Tangent => "tangent_holonomy",
        TransportMode::Tractor => "tractor_holonomy",
    };
    summary.insert(format!("{prefix}.dim"), json!(est.span.dim));

    let mut report = json!({
        "mode": format!("{mode:?}"),
        "base_point": base.coords(),
        "statement": "numerical lower bound dim = k, stable under refinement",
        "dim": est.span.dim,
        "n_loops": est.n_loops,
        "n_samples": est.n_samples,
        "singular_values": est.span.singular_values,
        "svd_threshold": est.span.threshold * tol_scale,
        "max_gram_residual": est.max_gram_residual,
        "loops": serde_json::to_value(&est.loops).unwrap(),
        "basis": est.span.basis.iter().map(|b| {
            let rows: Vec<Vec<f64>> = (0..b.nrows())
                .map(|i| (0..b.ncols()).map(|j| b[(i, j)]).collect())
                .collect();
            json!(rows)
        }).collect::<Vec<_>>(),
    });

    if cfg.options.stability_check {
        let refined = EnsembleOptions {
            n_random: opts.n_random * 2,
            rtol: opts.rtol / 2.0,
            atol: opts.atol / 2.0,
            ..opts.clone()
        };
        let est2 = estimate_holonomy(&st.metric, &base, mode, &refined)?;
        let stable = est2.span.dim == est.span.dim;
        report["refined_dim"] = json!(est2.span.dim);
        report["stable_under_refinement"] = json!(stable);
        summary.insert(format!("{prefix}.stable"), json!(stable));
    }

    // Wave-family pattern verdict for tractor mode.
    if mode == TransportMode::Tractor {
        if let SpacetimeSpec::PlaneWave { n, .. } | SpacetimeSpec::CahenWallach { n, .. } =
            &st.spec
        {
            let worst = est
                .span
                .basis
                .iter()
                .map(|b| models::wave_pattern_residual(b, *n))
                .fold(0.0f64, f64::max);
            report["wave_pattern_residual"] = json!(worst);
            summary.insert(
                "tractor_holonomy.pattern_ok".into(),
                json!(worst < 1e-6 * tol_scale),
            );
        }
        let kernel = joint_kernel(&est.span.basis);
        report["joint_kernel_dim"] = json!(kernel.len());
        summary.insert("tractor_holonomy.kernel_dim".into(), json!(kernel.len()));
    }

    Ok(report)
}

fn screen_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let rec = st.recurrent()?;
    let base = st.default_base_point();
    let opts = ensemble_options(cfg);
    let samples = ambrose_singer_samples(&st.metric, &base, TransportMode::Tangent, &opts)?;
    let frame = rec.adapted_frame(&st.metric, &base)?;
    let blocks = screen_blocks(&samples, &frame)?;
    let span = span_algebra(&blocks, cfg.tolerances.svd_threshold, false);
    summary.insert("screen_holonomy.dim".into(), json!(span.dim));
    let mut report = json!({
        "statement": "numerical lower bound dim = k, stable under refinement",
        "dim": span.dim,
        "singular_values": span.singular_values,
        "n_samples": samples.len(),
        "recurrent_parallel": rec.parallel,
    });
    // Product families: compare with the block's own holonomy.
    if let (SpacetimeSpec::RiemannianBlockProduct { .. }, Some(block)) = (&st.spec, &st.base) {
        let block_est = estimate_holonomy(
            &block.metric,
            &block.default_base_point(),
            TransportMode::Tangent,
            &opts,
        )?;
        report["block_holonomy_dim"] = json!(block_est.span.dim);
        summary.insert(
            "screen_holonomy.matches_block".into(),
            json!(block_est.span.dim == span.dim),
        );
    }
    Ok(report)
}

fn ambient_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let base_member = st
        .base
        .as_ref()
        .ok_or_else(|| Error::Spec("ambient_compare needs an ambient or cone family".into()))?;
    let opts = ensemble_options(cfg);
    let base_pt = st.default_base_point();
    let est = estimate_holonomy(&st.metric, &base_pt, TransportMode::Tangent, &opts)?;
    summary.insert("ambient_compare.ambient_dim".into(), json!(est.span.dim));

    let mut report = json!({
        "ambient_dim": est.span.dim,
        "ambient_singular_values": est.span.singular_values,
    });

    match &st.spec {
        SpacetimeSpec::AmbientRicciFlat { .. } => {
            // Christoffel table and curvature block residuals.
            let mut chr = 0.0f64;
            for p in points(st, cfg).iter().take(50) {
                chr = chr.max(zoo::ambient_christoffel_residual(st, p)?);
            }
            report["christoffel_table_residual"] = json!(chr);
            report["christoffel_table_threshold"] = json!(1e-12);
            summary.insert("ambient_compare.christoffel_residual".into(), json!(chr));

            // Base holonomy and parallel-field count give the expected
            // semidirect dimension base_dim + (n - k).
            let bb = base_member.default_base_point();
            let best = estimate_holonomy(&base_member.metric, &bb, TransportMode::Tangent, &opts)?;
            let k = if best.span.basis.is_empty() {
                base_member.dim()
            } else {
                joint_kernel(&best.span.basis).len()
            };
            let expected = best.span.dim + (base_member.dim() - k);
            report["base_dim"] = json!(best.span.dim);
            report["base_parallel_fields"] = json!(k);
            report["expected_ambient_dim"] = json!(expected);
            summary.insert(
                "ambient_compare.semidirect_match".into(),
                json!(expected == est.span.dim),
            );

            // The promised parallel coordinate field stays fixed.
            if let Some(idx) = st.parallel_coord {
                let mut v = nalgebra::DVector::zeros(st.dim());
                v[idx] = 1.0;
                let mut defect = 0.0f64;
                for (_, curve) in
                    confhol_core::transport::loop_family(&base_pt, 4, 0.4, cfg.seed)
                {
                    let tr = transport_tangent(
                        &st.metric,
                        &curve,
                        cfg.tolerances.rtol,
                        cfg.tolerances.atol,
                    )?;
                    defect = defect.max((&tr.matrix * &v - &v).amax());
                }
                report["parallel_field_defect"] = json!(defect);
                summary.insert("ambient_compare.parallel_defect".into(), json!(defect));
            }
        }
        SpacetimeSpec::AmbientEinstein { base } => {
            // Compare with the cone over the same base.
            let cone = zoo::build(&SpacetimeSpec::Cone { base: base.clone() })?;
            let cone_est = estimate_holonomy(
                &cone.metric,
                &cone.default_base_point(),
                TransportMode::Tangent,
                &opts,
            )?;
            report["cone_dim"] = json!(cone_est.span.dim);
            summary.insert(
                "ambient_compare.matches_cone".into(),
                json!(cone_est.span.dim == est.span.dim),
            );
            if let Some(idx) = st.parallel_coord {
                let gm = st.metric.eval(&base_pt)?;
                report["parallel_field_length_sign"] = json!(gm[(idx, idx)].signum());
            }
        }
        SpacetimeSpec::Cone { .. } => {}
        _ => {
            return Err(Error::Spec(
                "ambient_compare applies to ambient and cone families".into(),
            ))
        }
    }
    Ok(report)
}

fn berger_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let (label, report) = match cfg.options.berger_model.as_str() {
        "wave_pattern" => {
            let gens = models::wave_pattern_basis(cfg.options.wave_n);
            ("wave_pattern", berger_check(&gens, None)?)
        }
        "iso_l" => {
            let gens = models::iso_l_basis(cfg.options.wave_n);
            ("iso_l", berger_check(&gens, None)?)
        }
        "so" => {
            let gens = models::so_pq_basis(cfg.options.so_p, cfg.options.so_q);
            ("so", berger_check(&gens, None)?)
        }
        "estimated_tractor" => {
            let base = st.default_base_point();
            let est = estimate_holonomy(
                &st.metric,
                &base,
                TransportMode::Tractor,
                &ensemble_options(cfg),
            )?;
            ("estimated_tractor", berger_check_with(&est.span.basis, None, 1e-4)?)
        }
        other => {
            return Err(Error::Spec(format!(
                "unknown berger model `{other}`; use wave_pattern, iso_l, so, estimated_tractor"
            )))
        }
    };
    summary.insert("berger.is_berger".into(), json!(report.is_berger));
    summary.insert("berger.dim_algebra".into(), json!(report.dim_algebra));
    summary.insert("berger.dim_generated".into(), json!(report.dim_generated));
    Ok(json!({
        "model": label,
        "report": serde_json::to_value(&report).unwrap(),
    }))
}

fn sections_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let base = st.default_base_point();
    let z0 = base.coords()[st.dim() - 1];
    let sections = waves::plane_wave_sections(st, z0 - 0.5, z0 + 0.5, 32)?;
    let tractors = waves::section_tractors(st, &base, z0)?;

    // Transport-fixing defect over the loop inventory.
    let mut defect = 0.0f64;
    for (_, curve) in confhol_core::transport::loop_family(&base, 8, 0.4, cfg.seed) {
        let tr = confhol_core::transport::transport_tractor(
            &st.metric,
            &curve,
            cfg.tolerances.rtol,
            cfg.tolerances.atol,
        )?;
        for t in &tractors {
            let v = t.to_vector();
            defect = defect.max((&tr.matrix * &v - &v).amax());
        }
    }
    summary.insert("plane_wave_sections.transport_defect".into(), json!(defect));
    summary.insert(
        "plane_wave_sections.wronskian_drift".into(),
        json!(sections.wronskian_drift),
    );

    // Closed-form residual for constant coefficients.
    let closed_form_residual = if let SpacetimeSpec::CahenWallach { n, a } = &st.spec {
        let trace: f64 = (0..*n).map(|i| a[i][i]).sum();
        let mut worst = 0.0f64;
        for (k, &z) in sections.z_grid.iter().enumerate() {
            let (s1, t1, s2, t2) = waves::constant_trace_sections(trace, *n, z0 - 0.5, z);
            worst = worst
                .max((sections.sol1[k].0 - s1).abs())
                .max((sections.sol1[k].1 - t1).abs())
                .max((sections.sol2[k].0 - s2).abs())
                .max((sections.sol2[k].1 - t2).abs());
        }
        summary.insert("plane_wave_sections.closed_form_residual".into(), json!(worst));
        Some(worst)
    } else {
        None
    };

    Ok(json!({
        "sections": serde_json::to_value(&sections).unwrap(),
        "transport_defect": defect,
        "transport_defect_threshold": 1e-6,
        "wronskian_threshold": 1e-10,
        "closed_form_threshold": 1e-9,
        "closed_form_residual": closed_form_residual,
        "base_tractors": serde_json::to_value(&tractors).unwrap(),
        "isotropy": tractors.iter().map(|t| {
            confhol_core::tractor::tractor_inner(&st.metric, t, t).unwrap_or(f64::NAN)
        }).collect::<Vec<_>>(),
    }))
}

fn classify_report(
    st: &Spacetime,
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let base = st.default_base_point();
    let est = estimate_holonomy(
        &st.metric,
        &base,
        TransportMode::Tractor,
        &ensemble_options(cfg),
    )?;
    let gram = gram_matrix(&st.metric, &base)?;
    let form = IndefiniteForm::new(gram)?;
    let kernel = joint_kernel(&est.span.basis);
    let mut kernel_tags = Vec::new();
    for v in &kernel {
        let b = nalgebra::DMatrix::from_column_slice(v.len(), 1, v.as_slice());
        let (class, causal) = confhol_core::lie::classify_subspace(&b, &form);
        kernel_tags.push(json!({
            "class": serde_json::to_value(class).unwrap(),
            "causal": serde_json::to_value(causal).unwrap(),
        }));
    }
    let search = invariant_subspaces(&est.span.basis, 3, &form, cfg.seed);
    let subspaces: Vec<Value> = search
        .subspaces
        .iter()
        .map(|s| {
            json!({
                "dim": s.dim(),
                "class": serde_json::to_value(s.class).unwrap(),
                "causal": serde_json::to_value(s.causal).unwrap(),
                "invariance_residual": s.invariance_residual,
            })
        })
        .collect();
    let iso2 = search
        .subspaces
        .iter()
        .any(|s| s.dim() == 2 && s.class == confhol_core::lie::SubspaceClass::TotallyIsotropic);
    summary.insert("classify_invariants.holonomy_dim".into(), json!(est.span.dim));
    summary.insert("classify_invariants.kernel_dim".into(), json!(kernel.len()));
    summary.insert("classify_invariants.isotropic_plane".into(), json!(iso2));
    Ok(json!({
        "holonomy_dim": est.span.dim,
        "kernel_dim": kernel.len(),
        "kernel_classification": kernel_tags,
        "invariant_subspaces": subspaces,
        "duals": search.duals.iter().map(|(i, d)| json!([i, d])).collect::<Vec<_>>(),
        "inconclusive": search.inconclusive,
    }))
}

fn counterexample_report(
    cfg: &RunConfig,
    summary: &mut BTreeMap<String, Value>,
) -> Result<Value> {
    let n = cfg.options.wave_n;
    let m = n + 4;
    let form = models::corner_form(n);

    // Exact decomposable form with unit coefficients.
    let mut covectors = Vec::new();
    for idx in 0..(n + 2) {
        let row: Vec<BigRational> = (0..m)
            .map(|j| BigRational::from_integer(BigInt::from(form.gram[(idx, j)] as i64)))
            .collect();
        covectors.push(row);
    }
    let alpha = KForm::<BigRational>::wedge_of_covectors(m, &covectors);

    // Evaluation slots (z1, z2, y1..yn).
    let mut vectors = Vec::new();
    for idx in std::iter::once(m - 2)
        .chain(std::iter::once(m - 1))
        .chain(2..(n + 2))
    {
        let mut v = vec![BigRational::from_integer(BigInt::from(0)); m];
        v[idx] = BigRational::from_integer(BigInt::from(1));
        vectors.push(v);
    }

    let act = |mat: &[Vec<i64>]| -> BigRational {
        let a = RingMatrix::<BigRational>::from_i64(mat);
        alpha.action(&a).eval(&vectors)
    };
    let rank_one_value = act(&models::iso_l_rank_one_element(n));
    let diagonal_value = act(&models::iso_l_diagonal_element(n));

    let gens: Vec<RingMatrix<BigRational>> = models::iso_l_basis_exact(n)
        .iter()
        .map(|g| RingMatrix::from_i64(g))
        .collect();
    let stab = stabilizer_check(&gens, &alpha);

    // Float search for invariant subspaces of the stabilizer algebra.
    let search = invariant_subspaces(&models::iso_l_basis(n), 3, &form, cfg.seed);
    let plane = search
        .subspaces
        .iter()
        .find(|s| s.dim() == 2 && s.class == confhol_core::lie::SubspaceClass::TotallyIsotropic);

    let exact_minus_one = rank_one_value == BigRational::from_integer(BigInt::from(-1));
    summary.insert(
        "counterexample_iso_l.value".into(),
        json!(rank_one_value.to_string()),
    );
    summary.insert("counterexample_iso_l.fixed".into(), json!(stab.fixed));
    summary.insert(
        "counterexample_iso_l.exact_minus_one".into(),
        json!(exact_minus_one),
    );
    summary.insert(
        "counterexample_iso_l.invariant_plane_residual".into(),
        json!(plane.map(|s| s.invariance_residual)),
    );
    Ok(json!({
        "n": n,
        "form_action_value_rank_one": rank_one_value.to_string(),
        "form_action_value_diagonal": diagonal_value.to_string(),
        "stabilizer_fixed": stab.fixed,
        "stabilizer_max_action_norm": stab.max_action_norm,
        "per_generator_action_norms": stab.per_generator,
        "invariant_plane_found": plane.is_some(),
        "invariant_plane_residual": plane.map(|s| s.invariance_residual),
        "note": "the stabilizer of the isotropic plane fixes no decomposable top-degree co-form; the exact action value certifies it",
    }))
}
