//! Synthetic bursting waveforms with known event labels, for exercising the classifier.

use super::EventKind;

/// Shape of a constructed voltage trace. Each cycle is one spike from `v_rest` to `v_peak`,
/// a depolarized plateau carrying `sao` small oscillations, and a return to rest.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticBurst {
    /// SAO count of each cycle; the list is repeated `repeats` times.
    pub pattern: Vec<usize>,
    pub repeats: usize,
    pub v_rest: f64,
    pub v_peak: f64,
    pub v_plateau: f64,
    pub sao_amplitude: f64,
    /// Per-pattern-entry multiplier of `sao_amplitude`; missing entries count as 1.
    pub cycle_scale: Vec<f64>,
    pub spike_width: f64,
    pub sao_period: f64,
    pub rest_duration: f64,
    pub dt: f64,
}

impl SyntheticBurst {
    pub fn new(pattern: Vec<usize>, repeats: usize) -> Self {
        Self {
            pattern,
            repeats,
            v_rest: -65.0,
            v_peak: -10.0,
            v_plateau: -38.0,
            sao_amplitude: 8.0,
            cycle_scale: Vec::new(),
            spike_width: 4.0,
            sao_period: 6.0,
            rest_duration: 30.0,
            dt: 0.05,
        }
    }

    /// Knots `(time, value)` joined by half-cosine segments, so every interior knot where the
    /// direction reverses is a turning point.
    fn knots(&self) -> (Vec<(f64, f64)>, Vec<EventKind>) {
        // start above rest so the first trough is an interior turning point
        let mut k = vec![(0.0, self.v_rest + 0.5 * (self.v_plateau - self.v_rest))];
        let mut labels = Vec::new();
        let mut t = 0.0;
        let mut push = |dt: f64, v: f64, k: &mut Vec<(f64, f64)>| {
            t += dt;
            k.push((t, v));
        };
        for _ in 0..self.repeats {
            for (c, &s) in self.pattern.iter().enumerate() {
                let amp = self.sao_amplitude * self.cycle_scale.get(c).copied().unwrap_or(1.0);
                push(self.rest_duration, self.v_rest, &mut k);
                push(self.spike_width, self.v_peak, &mut k);
                labels.push(EventKind::Lao);
                push(self.spike_width, self.v_plateau, &mut k);
                for _ in 0..s {
                    push(0.5 * self.sao_period, self.v_plateau + amp, &mut k);
                    labels.push(EventKind::Sao);
                    push(0.5 * self.sao_period, self.v_plateau, &mut k);
                }
                push(self.spike_width, self.v_rest, &mut k);
            }
        }
        push(self.rest_duration, self.v_rest, &mut k);
        (k, labels)
    }

    /// Sampled trace and the ground-truth labels of its peaks, in order. SAOs scaled below the
    /// classifier floor still appear in the labels; callers using that should drop them.
    pub fn generate(&self) -> (Vec<f64>, Vec<f64>, Vec<EventKind>) {
        let (knots, labels) = self.knots();
        let t_end = knots.last().map_or(0.0, |k| k.0);
        let n = (t_end / self.dt).floor() as usize + 1;
        let mut seg = 0;
        let mut t = Vec::with_capacity(n);
        let mut v = Vec::with_capacity(n);
        for i in 0..n {
            let s = i as f64 * self.dt;
            while seg + 2 < knots.len() && s > knots[seg + 1].0 {
                seg += 1;
            }
            let (t0, v0) = knots[seg];
            let (t1, v1) = knots[seg + 1];
            let u = ((s - t0) / (t1 - t0)).clamp(0.0, 1.0);
            let w = 0.5 - 0.5 * (std::f64::consts::PI * u).cos();
            t.push(s);
            v.push(v0 + (v1 - v0) * w);
        }
        (t, v, labels)
    }

    /// Label the signature module should report for this pattern.
    pub fn expected_label(&self) -> String {
        let p = &self.pattern;
        if p.iter().all(|&s| s == p[0]) {
            format!("1^{}", p[0])
        } else {
            let (a, b) = (p[0].max(p[1]), p[0].min(p[1]));
            format!("1^{a} 1^{b}")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burst::{burst_signature, classify_events, ClassifierParams};

    #[test]
    fn labels_recovered() {
        let w = SyntheticBurst::new(vec![1, 0], 4);
        let (t, v, truth) = w.generate();
        let ev = classify_events(&t, &v, &ClassifierParams::new(-50.0)).unwrap();
        let kinds: Vec<EventKind> = ev.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, truth);
        assert_eq!(burst_signature(&ev).unwrap().label(), w.expected_label());
        assert_eq!(w.expected_label(), "1^1 1^0");
    }
}
