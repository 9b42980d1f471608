//! One function per experiment, each turning a config into output tables.
//!
//! Seeds come from `derive_seed(master, "<experiment>/<stream>", index)` with
//! `index` the position in the canonical grid.

use holo_lwe_core::ads_geometry::{entropy_gap_to_length_gap, geometry_from_qubits, rt_entropy, rt_geodesic_length};
use holo_lwe_core::cost_models::{comparison_table, qpe_cost};
use holo_lwe_core::fit::linear_fit;
use holo_lwe_core::gaussian_bulk::{
    build_chain_ground_covariance, bulk_entanglement_entropy, correlator_decay_exponent, flm_assemble, modes_needed,
    restrict_covariance, symplectic_spectrum, truncated_entropy, two_mode_squeezed_covariance, BulkEntropyRecord,
};
use holo_lwe_core::lwe_etcf::{sample_instance, LweParams, Mode};
use holo_lwe_core::probe_measurement::{
    empirical_min_shots, holographic_distinguisher, predicted_sample_complexity, regime_report,
    two_point_with_threshold, z_for_error_rate, ProbeConfig,
};
use holo_lwe_core::seed::{derive_seed, derived_rng};
use holo_lwe_core::state_entropy::{
    build_function_state, entropy_gap, input_entropy_bits, qed_decide, reduce_density_matrix, Register,
};
use holo_lwe_core::{LogBase, Result};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::{record, Table};

const MODES: [Mode; 2] = [Mode::Injective, Mode::Degenerate];

pub fn etcf(cfg: &RunConfig) -> Result<Vec<Table>> {
    let mut t = Table::new("etcf");
    for (i, p) in cfg.etcf.grid.iter().enumerate() {
        let noiseless = p.params();
        let mut variants = vec![noiseless.clone()];
        if cfg.etcf.sigma > 0.0 {
            variants.push(LweParams { sigma: cfg.etcf.sigma, noiseless: false, ..noiseless });
        }
        for params in variants {
            for mode in MODES {
                let label = format!("etcf/{}/{mode}", if params.noiseless { "noiseless" } else { "noisy" });
                let seed = derive_seed(cfg.seed, &label, i as u64);
                let inst = sample_instance(&params, mode, seed)?;
                let s = inst.preimage_census()?.summary();
                t.push(record(
                    "etcf-function-pair",
                    json!({
                        "q": params.q, "n": params.n, "k": params.k, "m_rows": params.m_rows,
                        "mode": mode, "noiseless": params.noiseless, "sigma": params.sigma, "seed": seed,
                        "total_inputs": s.total_inputs, "distinct_outputs": s.distinct_outputs,
                        "preimage_histogram": s.histogram,
                        "colliding_input_fraction": s.colliding_input_fraction,
                    }),
                ));
            }
        }
    }
    Ok(vec![t])
}

pub fn entropy(cfg: &RunConfig) -> Result<Vec<Table>> {
    let mut t = Table::new("entropy");
    for (i, p) in cfg.entropy.grid.iter().enumerate() {
        let params = p.params();
        let f = sample_instance(&params, Mode::Injective, derive_seed(cfg.seed, "entropy/injective", i as u64))?;
        let g = sample_instance(&params, Mode::Degenerate, derive_seed(cfg.seed, "entropy/degenerate", i as u64))?;
        let rho_f = reduce_density_matrix(&build_function_state(&f)?, Register::InputRegister)?;
        let rho_g = reduce_density_matrix(&build_function_state(&g)?, Register::InputRegister)?;
        let answer = qed_decide(&rho_f, &rho_g, p.k as f64)?;
        t.push(record(
            "entropy-difference",
            json!({
                "q": p.q, "n": p.n, "k": p.k,
                "entropy_injective_bits": input_entropy_bits(&f)?,
                "entropy_degenerate_bits": input_entropy_bits(&g)?,
                "entropy_gap": entropy_gap(&f, &g)?,
                "qed_answer": answer,
            }),
        ));
    }
    Ok(vec![t])
}

pub fn geodesic(cfg: &RunConfig) -> Result<Vec<Table>> {
    let g = &cfg.geodesic;
    let mut lengths = Table::new("geodesic");
    let mut gaps = Table::new("length_gap");
    for &n in &g.n_qubits {
        let geom = geometry_from_qubits(n, g.kappa)?;
        let c = geom.central_charge();
        for &ell in &g.intervals {
            let length = rt_geodesic_length(&geom, ell)?;
            let s = rt_entropy(&geom, length, LogBase::Nats)?;
            let cft = c / 3.0 * (ell / geom.cutoff).ln();
            lengths.push(record(
                "rt-geodesic-length",
                json!({
                    "N": n, "kappa": g.kappa, "newton_g": geom.newton_g, "central_charge": c,
                    "cutoff": geom.cutoff, "interval": ell, "length": length,
                    "entropy_nats": s, "entropy_bits": LogBase::Bits.from_nats(s), "cft_entropy_nats": cft,
                }),
            ));
        }
        for &ds in &g.ds_bits {
            gaps.push(record(
                "entropy-to-length-gap",
                json!({"N": n, "kappa": g.kappa, "ds_bits": ds, "length_gap": entropy_gap_to_length_gap(&geom, ds)?}),
            ));
        }
    }
    Ok(vec![lengths, gaps])
}

pub fn bulk(cfg: &RunConfig) -> Result<Vec<Table>> {
    let b = &cfg.bulk;
    let chain = build_chain_ground_covariance(b.sites, b.mass0, b.coupling)?;
    let mut entropies = Table::new("bulk_entropy");
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &ell in &b.intervals {
        let region: Vec<usize> = (0..ell).collect();
        let rec = BulkEntropyRecord::for_region(b.sites, b.mass0, b.coupling, &region, LogBase::Nats)?;
        xs.push((ell as f64).ln());
        ys.push(rec.entropy);
        let mut row = record("bulk-symplectic-entropy", &rec);
        row.insert("interval".into(), json!(ell));
        entropies.push(row);
    }
    let full: Vec<usize> = (0..b.sites).collect();
    let mut row = record(
        "bulk-symplectic-entropy",
        BulkEntropyRecord::for_region(b.sites, b.mass0, b.coupling, &full, LogBase::Nats)?,
    );
    row.insert("interval".into(), json!(b.sites));
    entropies.push(row);

    let mut fits = Table::new("bulk_fits");
    if let Some(fit) = linear_fit(&xs, &ys) {
        fits.push(record("entanglement-log-law", json!({"fit": "entropy_vs_ln_interval", "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared})));
    }
    if b.sites >= 8 {
        let site = b.sites / 4;
        let decay = correlator_decay_exponent(&chain, site, b.sites / 2 - 1)?;
        fits.push(record("correlator-decay", json!({"fit": "phi_correlator_power_law", "slope": decay.fit.slope, "intercept": decay.fit.intercept, "r_squared": decay.fit.r_squared, "exponent": decay.exponent})));
    }

    let half: Vec<usize> = (0..b.sites / 2).collect();
    let half_cov = restrict_covariance(&chain, &half)?;
    let mut truncation = Table::new("bulk_truncation");
    let needed = modes_needed(&half_cov, b.truncation_tolerance, LogBase::Nats)?;
    for j in 1..=half.len() {
        let tr = truncated_entropy(&half_cov, j, LogBase::Nats)?;
        truncation.push(record(
            "mode-truncation",
            json!({"J": j, "value": tr.value, "dropped_bound": tr.dropped_bound, "tolerance": b.truncation_tolerance, "modes_needed": needed}),
        ));
    }

    let mut squeezed = Table::new("bulk_squeezed");
    for &r in &b.squeezing {
        let cov = restrict_covariance(&two_mode_squeezed_covariance(r)?, &[0])?;
        let nu = symplectic_spectrum(&cov)?.nus[0];
        squeezed.push(record(
            "two-mode-squeezed",
            json!({"r": r, "nu": nu, "entropy_nats": bulk_entanglement_entropy(&cov, LogBase::Nats)?}),
        ));
    }

    // The classical term uses the half-boundary RT surface of a geometry with
    // log₂D qubits.
    let qubits = (b.sites as f64).log2().ceil().max(1.0) as u64;
    let geom = geometry_from_qubits(qubits, 1.0)?;
    let s_cl = rt_entropy(&geom, rt_geodesic_length(&geom, 0.5)?, LogBase::Nats)?;
    let s_bulk = bulk_entanglement_entropy(&half_cov, LogBase::Nats)?;
    let flm = flm_assemble(s_cl, s_bulk, b.delta_area_term, b.wald_like, b.counterterms);
    let mut flm_table = Table::new("bulk_flm");
    flm_table.push(record("flm-corrections", json!({"N": qubits, "breakdown": flm})));

    Ok(vec![entropies, fits, truncation, squeezed, flm_table])
}

pub fn costs(cfg: &RunConfig) -> Result<Vec<Table>> {
    let c = &cfg.costs;
    let table = comparison_table(&c.n_list, &c.table)?;
    let mut rows = Table::new("costs");
    let anchor = |label: &str| {
        if label.starts_with("bkz") {
            "bkz-attack-cost"
        } else if label.starts_with("holographic") {
            "holographic-cost"
        } else {
            "covariance-build-cost"
        }
    };
    let mut keyed: Vec<(u64, String, _)> =
        table.records.iter().map(|r| (r.n, r.label.clone(), record(anchor(&r.label), r))).collect();
    for &n in &c.n_list {
        let log2_cost = qpe_cost(c.qpe_sparsity, c.qpe_eps, n)?.log2();
        let label = "qpe-diagonalization";
        let body = json!({"label": label, "N": n, "log2_cost": log2_cost,
            "model_params": {"sparsity_exponent": c.qpe_sparsity, "eps": c.qpe_eps, "polylog_degree": 2.0}});
        keyed.push((n, label.to_string(), record("qpe-cost", body)));
    }
    keyed.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for (_, _, rec) in keyed {
        rows.push(rec);
    }
    let mut fits = Table::new("cost_fits");
    for (label, fit) in &table.fits {
        fits.push(record(
            "cost-scaling-fit",
            json!({"label": label, "slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared}),
        ));
    }
    Ok(vec![rows, fits])
}

pub fn protocol(cfg: &RunConfig) -> Result<Vec<Table>> {
    let p = &cfg.protocol;
    let params = p.point.params();
    let f = sample_instance(&params, Mode::Injective, derive_seed(cfg.seed, "protocol/injective", 0))?;
    let g = sample_instance(&params, Mode::Degenerate, derive_seed(cfg.seed, "protocol/degenerate", 0))?;
    let gap = entropy_gap(&f, &g)?;

    let geom = geometry_from_qubits(p.n_qubits, p.kappa)?;
    let base_length = rt_geodesic_length(&geom, p.interval)?;
    let dl = entropy_gap_to_length_gap(&geom, gap)?;
    let probe = ProbeConfig {
        mass: p.mass,
        sigma_shot: p.sigma_shot,
        n_qubits: p.n_qubits,
        kappa: p.kappa,
        z: p.z,
        alpha_exp: p.alpha_exp,
        base_length,
        ..ProbeConfig::default()
    };
    let sc = predicted_sample_complexity(&probe, base_length - dl, dl)?;
    let wkb = two_point_with_threshold(probe.mass, base_length - dl, probe.wkb_threshold)?;

    let mut chain = Table::new("protocol");
    chain.push(record(
        "entropy-to-geodesic-chain",
        json!({
            "q": p.point.q, "n": p.point.n, "k": p.point.k, "entropy_gap_bits": gap,
            "N": p.n_qubits, "kappa": p.kappa, "central_charge": geom.central_charge(),
            "interval": p.interval, "base_length": base_length, "length_gap": dl,
            "mass": p.mass, "sigma_shot": p.sigma_shot, "z": p.z,
            "delta_g": sc.delta_g, "m_exact": sc.m_exact, "ln_m_exact": sc.ln_m_exact,
            "m_bound": sc.m_bound, "ln_m_bound": sc.ln_m_bound,
            "wkb_valid": wkb.wkb_valid, "backreaction_ratio": probe.backreaction_ratio(),
            "regime_valid": probe.regime_valid(),
        }),
    ));

    let mut runs = Table::new("distinguisher");
    let mut index = 0u64;
    for &factor in &p.budget_factors {
        let budget = (factor * sc.m_exact).ceil().clamp(1.0, u64::MAX as f64) as u64;
        for truth in MODES {
            let seed = derive_seed(cfg.seed, "protocol/distinguisher", index);
            index += 1;
            let out = holographic_distinguisher(&geom, &probe, truth, gap, budget, p.repetitions, seed)?;
            runs.push(record(
                "holographic-distinguisher",
                json!({"budget_factor": factor, "truth": truth, "seed": seed, "outcome": out}),
            ));
        }
    }

    let mut scaling = Table::new("shot_scaling");
    let z_cal = z_for_error_rate(p.target_error)?;
    for (i, &m) in p.scaling_masses.iter().enumerate() {
        let cal = ProbeConfig { mass: m, sigma_shot: p.sigma_shot, z: z_cal, ..ProbeConfig::default() };
        let predicted = predicted_sample_complexity(&cal, p.scaling_length, p.scaling_gap)?;
        let default_z = predicted_sample_complexity(&ProbeConfig { z: p.z, ..cal }, p.scaling_length, p.scaling_gap)?;
        let mut rng = derived_rng(cfg.seed, "protocol/shots", i as u64);
        let search = empirical_min_shots(&cal, p.scaling_length, p.scaling_gap, p.target_error, p.trials, &mut rng)?;
        let ratio = search.shots().map(|s| s as f64 / predicted.m_exact);
        scaling.push(record(
            "geodesic-shot-complexity",
            json!({
                "mass": m, "length": p.scaling_length, "length_gap": p.scaling_gap,
                "target_error": p.target_error, "trials": p.trials, "z": z_cal,
                "m_exact": predicted.m_exact, "m_exact_default_z": default_z.m_exact, "default_z": p.z,
                "m_bound": predicted.m_bound, "search": search, "empirical_over_exact": ratio,
            }),
        ));
    }

    let mut regimes = Table::new("probe_regimes");
    for &n in &p.regime_n {
        let r = regime_report(n, p.kappa, &probe, gap)?;
        for entry in [&r.heavy, &r.light] {
            regimes.push(record(
                "probe-regimes",
                json!({"N": n, "ds_bits": gap, "scaling_exponent": r.scaling_exponent, "entry": entry}),
            ));
        }
    }

    Ok(vec![chain, runs, scaling, regimes])
}
