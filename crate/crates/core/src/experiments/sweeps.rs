use crate::beamforming::{
    aligned_phases, analog_beamformer, max_sr_an_beamformer, perturbed_beamformer,
    quantize_beamformer, BeamformerPair,
};
use crate::channel_model::build_channels;
use crate::link_sim::{
    monte_carlo_sinr_loss, parallel_map, point_rng, point_seed, simulate_probe_ber, Estimate,
    Receiver, RunningStats, SweepResult,
};
use crate::metrics::{secrecy_rate, sinr_loss_closed_form, SecrecyMode};
use crate::phase_quantizer::{codebook, PhaseCodebook, QeModel};

use super::{fmt_f64, ExperimentConfig, ExperimentError, Figure, SweepOutput, Table};

/// Runs the configured sweep on `workers` threads. Output is identical for
/// any worker count.
pub fn run_sweep(config: &ExperimentConfig, workers: usize) -> Result<SweepOutput, ExperimentError> {
    let codebooks = config
        .grids
        .bits
        .iter()
        .map(|&b| codebook(b))
        .collect::<Result<Vec<_>, _>>()?;
    // surface scenario errors before spending time on a sweep
    config
        .scenario
        .to_scenario(config.grids.n_alice[0], config.grids.snr_db[0])
        .validate()?;
    let (result, table, sidecar) = match config.figure {
        Figure::BerSweep => ber_sweep(config, &codebooks, workers)?,
        Figure::SinrVsL | Figure::SinrVsNa => sinr_sweep(config, &codebooks, workers),
        Figure::SrVsL | Figure::SrVsLNa => sr_sweep(config, &codebooks, workers)?,
    };
    Ok(SweepOutput {
        config: config.clone(),
        result,
        table,
        sidecar,
    })
}

type Tables = (SweepResult, Table, Option<Table>);

fn probe_angles(step: f64) -> Vec<f64> {
    let count = (180.0 / step + 1e-9).floor() as usize;
    (0..=count).map(|k| k as f64 * step).collect()
}

fn ber_sweep(
    config: &ExperimentConfig,
    codebooks: &[PhaseCodebook],
    workers: usize,
) -> Result<Tables, ExperimentError> {
    let n_alice = config.grids.n_alice[0];
    let snr_db = config.grids.snr_db[0];
    let scenario = config.scenario.to_scenario(n_alice, snr_db);
    let angles = probe_angles(config.grids.angle_step);
    // curve 0 is ideal phases, curve k uses codebooks[k - 1]
    let curves: Vec<Option<&PhaseCodebook>> =
        std::iter::once(None).chain(codebooks.iter().map(Some)).collect();
    let master = config.trial.master_seed;

    let mut points: Vec<(Receiver, [u64; 3])> = Vec::new();
    for ci in 0..curves.len() {
        for (ai, &deg) in angles.iter().enumerate() {
            points.push((Receiver::Probe(deg.to_radians()), [0, ai as u64, ci as u64]));
        }
    }
    for ci in 0..curves.len() {
        points.push((Receiver::Bob, [1, 0, ci as u64]));
    }
    let estimates = parallel_map(&points, workers, |(receiver, idx)| {
        let seed = point_seed(master, idx);
        let mut rng = point_rng(seed);
        simulate_probe_ber(*receiver, &scenario, curves[idx[2] as usize], &config.trial, &mut rng)
            .map(|e| (e, seed))
    });

    let mut result = SweepResult::default();
    let mut table = Table::new(&["angle_deg", "receiver_model", "L_or_NQE", "ber", "stderr"]);
    table.notes.push(format!(
        "probe: Alice via g_ae and h(theta), AN via the nominal Bob->Eve channel; bob: self-interference receive model at angle_ab; N_a = {n_alice}, snr_db = {}",
        fmt_f64(snr_db)
    ));
    for ((receiver, idx), est) in points.iter().zip(estimates) {
        let (est, seed) = est?;
        let ci = idx[2] as usize;
        let label = match curves[ci] {
            None => "NQE".to_owned(),
            Some(cb) => cb.bits().to_string(),
        };
        let (model, deg) = match receiver {
            Receiver::Probe(_) => ("probe", angles[idx[1] as usize]),
            Receiver::Bob => ("bob", config.scenario.angle_ab),
        };
        let bits_axis = curves[ci].map_or(f64::INFINITY, |cb| cb.bits() as f64);
        result.push(
            &[("angle_deg", deg), ("L", bits_axis)],
            &format!("ber_{model}"),
            est,
            seed,
        );
        table.rows.push(vec![
            fmt_f64(deg),
            model.to_owned(),
            label,
            fmt_f64(est.mean),
            fmt_f64(est.stderr),
        ]);
    }
    Ok((result, table, None))
}

fn sinr_sweep(config: &ExperimentConfig, codebooks: &[PhaseCodebook], workers: usize) -> Tables {
    let grids = &config.grids;
    let trial = &config.trial;
    let points: Vec<(usize, usize)> = (0..codebooks.len())
        .flat_map(|li| (0..grids.n_alice.len()).map(move |ni| (li, ni)))
        .collect();
    let estimates = parallel_map(&points, workers, |&(li, ni)| {
        let seed = point_seed(trial.master_seed, &[li as u64, ni as u64]);
        let mut rng = point_rng(seed);
        let geometry = crate::array_geometry::ArrayGeometry::new(
            grids.n_alice[ni],
            config.scenario.spacing_ratio,
        )
        .expect("validated grid");
        let est = monte_carlo_sinr_loss(
            &geometry,
            &codebooks[li],
            trial.trials,
            trial.qe_model,
            &mut rng,
        );
        (est, seed)
    });

    let mut result = SweepResult::default();
    let mut table = Table::new(&[
        "L",
        "N_a",
        "loss_db_simulated",
        "loss_db_closed_form",
        "stderr",
    ]);
    if trial.qe_model == QeModel::Deterministic {
        table
            .notes
            .push("deterministic quantizer: desired direction drawn uniformly per trial".into());
    }
    for (&(li, ni), (est, seed)) in points.iter().zip(estimates) {
        let cb = &codebooks[li];
        let n = grids.n_alice[ni];
        let closed = sinr_loss_closed_form(cb);
        let axes = [("L", cb.bits() as f64), ("N_a", n as f64)];
        result.push(&axes, "sinr_loss_db", est, seed);
        result.push(&axes, "sinr_loss_db_closed_form", Estimate::exact(closed), seed);
        table.rows.push(vec![
            cb.bits().to_string(),
            n.to_string(),
            fmt_f64(est.mean),
            fmt_f64(closed),
            fmt_f64(est.stderr),
        ]);
    }

    let mut sidecar = Table::new(&["L", "loss_db_closed_form", "stderr"]);
    sidecar
        .notes
        .push("closed-form SINR loss 10*log10(1/sinc^2(pi/2^L))".into());
    for cb in codebooks {
        sidecar.rows.push(vec![
            cb.bits().to_string(),
            fmt_f64(sinr_loss_closed_form(cb)),
            fmt_f64(0.0),
        ]);
    }
    (result, table, Some(sidecar))
}

struct SrGroup {
    seed: u64,
    nqe: Estimate,
    sampled: Vec<Estimate>,
    expected: Vec<Estimate>,
}

fn sr_group(
    config: &ExperimentConfig,
    codebooks: &[PhaseCodebook],
    ni: usize,
    si: usize,
) -> Result<SrGroup, crate::Error> {
    let trial = &config.trial;
    let scenario = config
        .scenario
        .to_scenario(config.grids.n_alice[ni], config.grids.snr_db[si]);
    let geometry = scenario.alice_geometry()?;
    let phases = aligned_phases(&geometry, scenario.angle_ab);
    let v_ideal = analog_beamformer(&phases);
    let fixed: Vec<Option<Vec<_>>> = codebooks
        .iter()
        .map(|cb| match trial.qe_model {
            QeModel::Deterministic => Some(quantize_beamformer(&phases, cb).0),
            QeModel::Uniform => None,
        })
        .collect();

    // channel draws are shared by every L so the NQE reference is paired
    let seed = point_seed(trial.master_seed, &[ni as u64, si as u64]);
    let mut channel_rng = point_rng(seed);
    let mut qe_rngs: Vec<_> = (0..codebooks.len())
        .map(|li| point_rng(point_seed(trial.master_seed, &[ni as u64, si as u64, li as u64])))
        .collect();
    let mut nqe = RunningStats::default();
    let mut sampled = vec![RunningStats::default(); codebooks.len()];
    let mut expected = vec![RunningStats::default(); codebooks.len()];
    for _ in 0..trial.trials {
        let channels = build_channels(&scenario, &mut channel_rng)?;
        let v_b = max_sr_an_beamformer(&channels, &scenario, &v_ideal)?;
        let mut bf = BeamformerPair {
            v_a_ideal: v_ideal.clone(),
            v_a_quantized: v_ideal.clone(),
            v_b,
        };
        nqe.push(secrecy_rate(&channels, &scenario, &bf, SecrecyMode::Nqe, &codebooks[0])?);
        for (li, cb) in codebooks.iter().enumerate() {
            bf.v_a_quantized = match &fixed[li] {
                Some(v) => v.clone(),
                None => perturbed_beamformer(&phases, cb, &mut qe_rngs[li]).0,
            };
            sampled[li].push(secrecy_rate(&channels, &scenario, &bf, SecrecyMode::QeSampled, cb)?);
            expected[li].push(secrecy_rate(
                &channels,
                &scenario,
                &bf,
                SecrecyMode::QeExpected,
                cb,
            )?);
        }
    }
    Ok(SrGroup {
        seed,
        nqe: nqe.estimate(),
        sampled: sampled.iter().map(RunningStats::estimate).collect(),
        expected: expected.iter().map(RunningStats::estimate).collect(),
    })
}

fn sr_sweep(
    config: &ExperimentConfig,
    codebooks: &[PhaseCodebook],
    workers: usize,
) -> Result<Tables, ExperimentError> {
    let grids = &config.grids;
    let groups: Vec<(usize, usize)> = (0..grids.n_alice.len())
        .flat_map(|ni| (0..grids.snr_db.len()).map(move |si| (ni, si)))
        .collect();
    let computed = parallel_map(&groups, workers, |&(ni, si)| {
        sr_group(config, codebooks, ni, si)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;

    let columns = ["L", "N_a", "snr_db", "sr_nqe", "sr_qe", "stderr"];
    let mut result = SweepResult::default();
    let mut table = Table::new(&columns);
    table.notes.push(format!(
        "sr_qe: quantized beamformer realized on both links ({} model); stderr is for sr_qe",
        config.trial.qe_model
    ));
    let mut sidecar = Table::new(&columns);
    sidecar.notes.push(
        "sr_qe: Bob gain N_a*sinc^2(pi/2^L), Eve gain at its expectation (1-sinc^2)+sinc^2*G_e; averaged over the same self-interference channel draws"
            .into(),
    );
    for (li, cb) in codebooks.iter().enumerate() {
        for (&(ni, si), group) in groups.iter().zip(&computed) {
            let n = grids.n_alice[ni];
            let snr = grids.snr_db[si];
            let axes = [("L", cb.bits() as f64), ("N_a", n as f64), ("snr_db", snr)];
            result.push(&axes, "sr_nqe", group.nqe, group.seed);
            result.push(&axes, "sr_qe", group.sampled[li], group.seed);
            result.push(&axes, "sr_qe_closed_form", group.expected[li], group.seed);
            table.rows.push(vec![
                cb.bits().to_string(),
                n.to_string(),
                fmt_f64(snr),
                fmt_f64(group.nqe.mean),
                fmt_f64(group.sampled[li].mean),
                fmt_f64(group.sampled[li].stderr),
            ]);
            sidecar.rows.push(vec![
                cb.bits().to_string(),
                n.to_string(),
                fmt_f64(snr),
                fmt_f64(group.nqe.mean),
                fmt_f64(group.expected[li].mean),
                fmt_f64(0.0),
            ]);
        }
    }
    Ok((result, table, Some(sidecar)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::parse_config;

    #[test]
    fn probe_angle_grid() {
        assert_eq!(probe_angles(90.0), vec![0.0, 90.0, 180.0]);
        assert_eq!(probe_angles(1.0).len(), 181);
        assert_eq!(probe_angles(7.0).last(), Some(&175.0));
    }

    #[test]
    fn sinr_vs_l_row_counts() {
        let raw = "[trial]\ntrials = 50\n";
        let c = parse_config(raw, Some(Figure::SinrVsL)).unwrap();
        let out = run_sweep(&c, 2).unwrap();
        assert_eq!(out.table.rows.len(), 32);
        assert_eq!(out.sidecar.as_ref().unwrap().rows.len(), 8);
    }

    #[test]
    fn sr_rows_share_nqe_reference_across_bits() {
        let raw = "[grids]\nbits = [1, 3]\nsnr_db = [15.0]\n[trial]\ntrials = 20\n";
        let c = parse_config(raw, Some(Figure::SrVsL)).unwrap();
        let out = run_sweep(&c, 1).unwrap();
        assert_eq!(out.table.rows.len(), 2);
        assert_eq!(out.table.rows[0][3], out.table.rows[1][3]);
    }
}
