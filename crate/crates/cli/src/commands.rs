use std::path::{Path, PathBuf};

use log::{info, warn};
use qnute::{
    analytic_price, build_bs_pauli, encode_samples, evolve, exact_trajectory, fidelity_stats, payoff_samples, price_run,
    reference_pde_solution, split_terms, BSParams, Grid, OptionContract, QnuteConfig, QnuteError,
};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::AppError;
use crate::output::{self, FidelityRow, PriceRow};

/// Largest register `decompose` will densify.
const DECOMPOSE_QUBIT_LIMIT: usize = 10;

fn grid_and_params(cfg: &RunConfig, n: usize) -> Result<(Grid<f64>, BSParams<f64>), AppError> {
    Ok((Grid::new(cfg.x0, cfg.xn, n)?, BSParams::new(cfg.r, cfg.sigma)?))
}

fn qnute_config(cfg: &RunConfig, n: usize, domain_size: usize) -> QnuteConfig<f64> {
    let mut q = QnuteConfig::new(cfg.maturity, cfg.steps, domain_size);
    q.basis = cfg.basis;
    q.lstsq_rel_tol = cfg.lstsq_rel_tol;
    q.term_strategy = cfg.term_strategy.resolve(n, domain_size);
    q.track_step_fidelity = cfg.track_step_fidelity;
    q
}

fn create_dir(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

fn write_config(dir: &Path, cfg: &RunConfig) -> Result<(), AppError> {
    let path = dir.join("config.txt");
    std::fs::write(&path, cfg.to_canonical()).map_err(|e| AppError::io(&path, e))
}

pub fn price(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, AppError> {
    let (grid, p) = grid_and_params(cfg, cfg.n)?;
    let d = cfg.domain_size_for(cfg.n);
    let qcfg = qnute_config(cfg, cfg.n, d);
    qcfg.validate(cfg.n)?;
    let run = price_run(&cfg.contract, &grid, &p, &qcfg)?;
    let reference = reference_pde_solution(&cfg.contract, &grid, &p, &qcfg)?;
    let tau = qcfg.total_time();
    info!(
        "{} n={} D={d} {}: C* = {:e} from the {} boundary, {} measurements",
        cfg.contract,
        cfg.n,
        qcfg.term_strategy,
        run.c_star,
        run.side,
        run.trajectory.measurement_count()
    );

    let rows = grid
        .points()
        .into_iter()
        .enumerate()
        .map(|(k, x)| {
            Ok(PriceRow { x, qnute: run.prices[k], reference: reference[k], analytic: analytic_price(&cfg.contract, x, tau, &p)? })
        })
        .collect::<Result<Vec<_>, QnuteError>>()?;

    create_dir(out)?;
    let prices = out.join("prices.csv");
    let trajectory = out.join("trajectory.csv");
    output::write_prices(&prices, &rows)?;
    output::write_trajectory(&trajectory, &run.trajectory.summaries())?;
    write_config(out, cfg)?;
    Ok(vec![prices, trajectory])
}

fn sweep_row(cfg: &RunConfig, contract: &OptionContract, n: usize, d: usize) -> Result<FidelityRow, AppError> {
    let (grid, p) = grid_and_params(cfg, n)?;
    let mut qcfg = qnute_config(cfg, n, d);
    qcfg.track_step_fidelity = false;
    let initial = encode_samples(&payoff_samples(contract, &grid))?;
    let terms = split_terms(&build_bs_pauli(&grid, &p, cfg.boundary)?, qcfg.term_strategy)?;
    let q = evolve(&initial, &terms, &qcfg)?;
    let e = exact_trajectory(&initial, &terms, &qcfg)?;
    let stats = fidelity_stats(&q, &e)?;
    info!("{contract} n={n} D={d}: mu_F = {:.6}, sigma_F = {:.3e}", stats.mean, stats.std);
    Ok(FidelityRow { option: contract.to_string(), n, d, stats })
}

pub fn fidelity_sweep(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, AppError> {
    if cfg.sweep_options.is_empty() {
        return Err(AppError::Usage("sweep.options is empty".into()));
    }
    if cfg.sweep_n.is_empty() || cfg.sweep_domain_sizes.is_empty() {
        return Err(AppError::Usage("sweep.n and sweep.domain_sizes must be non-empty".into()));
    }
    let mut combos = Vec::new();
    for contract in &cfg.sweep_options {
        for &n in &cfg.sweep_n {
            for &d in &cfg.sweep_domain_sizes {
                if d > n || d == 0 {
                    warn!("skipping {contract} n={n} D={d}: domain size must lie in 1..=n");
                    continue;
                }
                combos.push((contract, n, d));
            }
        }
    }
    let rows = combos
        .par_iter()
        .map(|&(contract, n, d)| sweep_row(cfg, contract, n, d))
        .collect::<Result<Vec<_>, _>>()?;

    create_dir(out)?;
    let path = out.join("fidelity.csv");
    output::write_fidelity(&path, &rows)?;
    write_config(out, cfg)?;
    Ok(vec![path])
}

pub fn decompose(cfg: &RunConfig, out: &Path) -> Result<Vec<PathBuf>, AppError> {
    if cfg.n > DECOMPOSE_QUBIT_LIMIT {
        return Err(QnuteError::Capacity { what: format!("dense dump of {} qubits", cfg.n), limit: DECOMPOSE_QUBIT_LIMIT }.into());
    }
    let (grid, p) = grid_and_params(cfg, cfg.n)?;
    let h = build_bs_pauli(&grid, &p, cfg.boundary)?;
    println!("{} Pauli terms ({} boundary, n = {})", h.len(), cfg.boundary, cfg.n);

    create_dir(out)?;
    let text = out.join("hamiltonian_pauli.txt");
    let dense = out.join("hamiltonian_dense.csv");
    std::fs::write(&text, format!("{h}\n")).map_err(|e| AppError::io(&text, e))?;
    output::write_dense(&dense, &h.dense_matrix()?)?;
    write_config(out, cfg)?;
    Ok(vec![text, dense])
}
