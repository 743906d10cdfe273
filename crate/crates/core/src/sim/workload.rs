use rand::Rng;

use super::scenario::{Band, BandMix, BandRanges, Sampling, ScenarioSpec, TaskMix};
use crate::model::{Task, TaskCategory, TaskId};
use crate::SimRng;

fn pick_band<R: Rng + ?Sized>(mix: &BandMix, rng: &mut R) -> Band {
    let u: f64 = rng.random();
    if u < mix.low {
        Band::Low
    } else if u < mix.low + mix.moderate {
        Band::Moderate
    } else {
        Band::High
    }
}

fn draw_in<R: Rng + ?Sized>(range: [f64; 2], sampling: Sampling, rng: &mut R) -> f64 {
    let [lo, hi] = range;
    if hi <= lo {
        return lo;
    }
    let u: f64 = rng.random();
    match sampling {
        Sampling::Uniform => lo + u * (hi - lo),
        Sampling::LogUniform => (lo.ln() + u * (hi.ln() - lo.ln())).exp(),
    }
}

fn draw_banded<R: Rng + ?Sized>(mix: &BandMix, ranges: &BandRanges, sampling: Sampling, rng: &mut R) -> (Band, f64) {
    let band = pick_band(mix, rng);
    (band, draw_in(ranges.get(band), sampling, rng))
}

/// Draws one task's attributes from the mix. Arrival time is zero.
pub fn draw_task<R: Rng + ?Sized>(id: TaskId, mix: &TaskMix, rng: &mut R) -> Task {
    let (lat_band, latency) = draw_banded(&mix.latency, &mix.latency_bands, mix.latency_sampling, rng);
    let (cx_band, complexity) = draw_banded(&mix.complexity, &mix.complexity_bands, mix.complexity_sampling, rng);
    let size = mix.data_size.in_mb();
    let data_size = draw_in([size.min, size.max], Sampling::Uniform, rng);
    let privacy = rng.random::<f64>() < mix.privacy_probability;
    let category = match (lat_band, cx_band) {
        (Band::Low, _) => TaskCategory::Realtime,
        (_, Band::High) => TaskCategory::Analytics,
        _ => TaskCategory::Aggregation,
    };
    Task::new(id, latency, complexity, data_size, privacy)
        .expect("validated bands are positive")
        .with_category(category)
}

/// Exactly `task_count` tasks in arrival order. Arrival instants are the
/// order statistics of uniform draws over the horizon, which is a Poisson
/// process conditioned on its count.
pub fn generate_workload(spec: &ScenarioSpec, rng: &mut SimRng) -> Vec<Task> {
    let mut arrivals: Vec<f64> = (0..spec.task_count)
        .map(|_| rng.random::<f64>() * spec.duration)
        .collect();
    arrivals.sort_by(f64::total_cmp);
    arrivals
        .into_iter()
        .enumerate()
        .map(|(i, t)| {
            draw_task(i as TaskId, &spec.mix, rng)
                .with_arrival(t)
                .expect("arrival within horizon")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn all_low_latency_mix() {
        let mut spec = ScenarioSpec::smart_city();
        spec.mix.latency = BandMix {
            low: 1.0,
            moderate: 0.0,
            high: 0.0,
        };
        let tasks = generate_workload(&spec, &mut SimRng::seed_from_u64(1));
        assert_eq!(tasks.len(), spec.task_count);
        assert!(tasks.iter().all(|t| t.latency_req() < 0.010));
    }

    #[test]
    fn zero_privacy_probability() {
        let mut spec = ScenarioSpec::smart_city();
        spec.mix.privacy_probability = 0.0;
        let tasks = generate_workload(&spec, &mut SimRng::seed_from_u64(2));
        assert!(tasks.iter().all(|t| !t.is_sensitive()));
    }

    #[test]
    fn same_seed_same_tasks() {
        let spec = ScenarioSpec::smart_city();
        let a = generate_workload(&spec, &mut SimRng::seed_from_u64(3));
        let b = generate_workload(&spec, &mut SimRng::seed_from_u64(3));
        assert_eq!(a, b);
    }

    #[test]
    fn arrivals_sorted_within_horizon_and_ids_unique() {
        let spec = ScenarioSpec::smart_city();
        let tasks = generate_workload(&spec, &mut SimRng::seed_from_u64(4));
        for w in tasks.windows(2) {
            assert!(w[0].arrival_time() <= w[1].arrival_time());
            assert!(w[0].id() < w[1].id());
        }
        assert!(tasks.iter().all(|t| (0.0..=spec.duration).contains(&t.arrival_time())));
    }

    #[test]
    fn attributes_stay_inside_bands() {
        let spec = ScenarioSpec::smart_city();
        let tasks = generate_workload(&spec, &mut SimRng::seed_from_u64(5));
        let lat = spec.mix.latency_bands.span();
        let cx = spec.mix.complexity_bands.span();
        let ds = spec.mix.data_size.in_mb();
        for t in &tasks {
            assert!(t.latency_req() >= lat.min && t.latency_req() <= lat.max);
            assert!(t.complexity() >= cx.min * (1.0 - 1e-12) && t.complexity() <= cx.max * (1.0 + 1e-12));
            assert!(t.data_size() >= ds.min && t.data_size() <= ds.max);
        }
    }
}
