use super::point::Point2;
use std::fmt;
use std::sync::Arc;

/// A continuous potential `V` on the domain closure.
///
/// Evaluation is deterministic; the optional bounds sharpen the pointwise
/// certificates used by the site classification.
#[derive(Clone)]
pub struct PotentialField {
    eval: Arc<dyn Fn(Point2) -> f64 + Send + Sync>,
    sup_bound: Option<f64>,
    lipschitz_bound: Option<f64>,
    label: String,
}

impl fmt::Debug for PotentialField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PotentialField")
            .field("label", &self.label)
            .field("sup_bound", &self.sup_bound)
            .field("lipschitz_bound", &self.lipschitz_bound)
            .finish()
    }
}

impl PotentialField {
    pub fn new<F>(label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(Point2) -> f64 + Send + Sync + 'static,
    {
        PotentialField {
            eval: Arc::new(eval),
            sup_bound: None,
            lipschitz_bound: None,
            label: label.into(),
        }
    }

    pub fn with_sup_bound(mut self, bound: f64) -> Self {
        self.sup_bound = Some(bound);
        self
    }

    pub fn with_lipschitz_bound(mut self, bound: f64) -> Self {
        self.lipschitz_bound = Some(bound);
        self
    }

    pub fn constant(c: f64) -> Self {
        PotentialField::new(format!("constant({c})"), move |_| c)
            .with_sup_bound(c.abs())
            .with_lipschitz_bound(0.0)
    }

    pub fn eval(&self, p: Point2) -> f64 {
        (self.eval)(p)
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_eval() {
        let v = PotentialField::new("affine", |p: Point2| p.x - 0.5);
        let p = Point2::new(0.3, 0.9);
        assert_eq!(v.eval(p), v.eval(p));
        assert_eq!(v.eval(p), -0.2);
    }
}
