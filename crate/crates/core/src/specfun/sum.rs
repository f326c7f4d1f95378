use num_complex::Complex64;

/// Neumaier compensated summation for complex terms, also tracking the
/// sum of magnitudes so callers can estimate cancellation.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: Complex64,
    comp: Complex64,
    abs_sum: f64,
}

fn two_sum(acc: f64, comp: &mut f64, x: f64) -> f64 {
    let t = acc + x;
    if acc.abs() >= x.abs() {
        *comp += (acc - t) + x;
    } else {
        *comp += (x - t) + acc;
    }
    t
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        self.sum.re = two_sum(self.sum.re, &mut self.comp.re, x.re);
        self.sum.im = two_sum(self.sum.im, &mut self.comp.im, x.im);
        self.abs_sum += x.norm();
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.comp
    }

    /// Ratio of the summed magnitudes to the magnitude of the sum.
    pub fn condition(&self) -> f64 {
        let v = self.value().norm();
        if v == 0.0 {
            f64::INFINITY
        } else {
            self.abs_sum / v
        }
    }
}
