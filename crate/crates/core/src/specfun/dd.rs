//! Complex double-double arithmetic for summing badly conditioned series.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul(Dd::from_f64(q1)));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul(Dd::from_f64(q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }.add(Dd::from_f64(q3))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn from_c64(z: Complex64) -> CDd {
        CDd { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn add_real(self, x: f64) -> CDd {
        CDd { re: self.re.add(Dd::from_f64(x)), im: self.im }
    }

    pub fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn div(self, o: CDd) -> CDd {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let conj = CDd { re: o.re, im: o.im.neg() };
        let num = self.mul(conj);
        CDd { re: num.re.div(den), im: num.im.div(den) }
    }

    pub fn norm(self) -> f64 {
        self.to_c64().norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_is_exact_to_double_double() {
        let t = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let back = t.mul(Dd::from_f64(3.0)).sub(Dd::from_f64(1.0));
        assert!(back.to_f64().abs() < 1e-31);
        assert!(t.lo != 0.0);
    }

    #[test]
    fn complex_division_roundtrip() {
        let a = CDd::from_c64(Complex64::new(0.3, -1.7));
        let b = CDd::from_c64(Complex64::new(2.1, 0.4));
        let r = a.div(b).mul(b);
        let d = CDd { re: r.re.sub(a.re), im: r.im.sub(a.im) };
        assert!(d.norm() < 1e-30);
    }
}
