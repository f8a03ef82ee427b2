use std::collections::BTreeMap;
use std::sync::Arc;

use super::{Check, Scheme};
use crate::arn::{bind, Arn, ArnError, ArnMorphism, ArnSpec};
use crate::ltl;

/// Networks of Muller automata with LTL specifications at points.
#[derive(Debug, Clone)]
pub struct ArnScheme {
    /// Bound on the number of bindings used to ground a network from a pool.
    pub max_bindings: usize,
    pub max_models: usize,
}

impl Default for ArnScheme {
    fn default() -> Self {
        ArnScheme { max_bindings: 4, max_models: 64 }
    }
}

/// Networks that may be bound to requires-points, each with an optional
/// message correspondence.
pub type ArnPool = Vec<(Arc<Arn>, Option<BTreeMap<String, String>>)>;

impl ArnScheme {
    fn ground_models(&self, m: ArnMorphism, pool: &ArnPool, depth: usize, out: &mut Vec<ArnMorphism>) -> Result<(), ArnError> {
        if out.len() >= self.max_models {
            return Ok(());
        }
        let target = m.target.clone();
        let Some(x) = target.classify_points().requires.into_iter().next() else {
            out.push(m);
            return Ok(());
        };
        if depth == self.max_bindings {
            return Ok(());
        }
        for (net, hint) in pool {
            for y in net.classify_points().provides {
                let Ok(Some(b)) = bind(&target, &x, net, &y, hint.as_ref()) else { continue };
                self.ground_models(m.then(&b.query_map)?, pool, depth + 1, out)?;
            }
        }
        Ok(())
    }
}

impl Scheme for ArnScheme {
    type Orc = Arc<Arn>;
    type Spec = ArnSpec;
    type Morphism = ArnMorphism;
    type Hint = BTreeMap<String, String>;
    type Pool = ArnPool;
    type Error = ArnError;

    fn bounded(&self) -> bool {
        false
    }

    fn orc_label(&self, o: &Arc<Arn>) -> String {
        o.name.clone()
    }

    fn spec_key(&self, s: &ArnSpec) -> String {
        s.point.clone()
    }

    fn identity(&self, o: &Arc<Arn>) -> ArnMorphism {
        ArnMorphism::identity(o.clone())
    }

    fn compose(&self, f: &ArnMorphism, g: &ArnMorphism) -> Result<ArnMorphism, ArnError> {
        f.then(g)
    }

    fn target(&self, m: &ArnMorphism) -> Arc<Arn> {
        m.target.clone()
    }

    fn translate(&self, m: &ArnMorphism, s: &ArnSpec) -> Result<ArnSpec, ArnError> {
        m.translate_spec(s)
    }

    fn is_ground(&self, o: &Arc<Arn>) -> bool {
        o.is_ground()
    }

    fn is_property(&self, o: &Arc<Arn>, s: &ArnSpec) -> Result<Check, ArnError> {
        Ok(if o.is_property(s)? { Check::Holds } else { Check::Fails })
    }

    /// Valid formulas.
    fn is_trivial(&self, _: &Arc<Arn>, s: &ArnSpec) -> Result<bool, ArnError> {
        Ok(ltl::is_valid(&s.formula)?)
    }

    fn spec_entails(&self, _: &Arc<Arn>, strong: &ArnSpec, weak: &ArnSpec) -> Result<bool, ArnError> {
        Ok(strong.point == weak.point && ltl::entails(&strong.formula, &weak.formula)?)
    }

    fn bind(
        &self,
        q: &Arc<Arn>,
        qs: &ArnSpec,
        c: &Arc<Arn>,
        cs: &ArnSpec,
        hint: Option<&Self::Hint>,
        _fresh: usize,
    ) -> Result<Vec<(ArnMorphism, ArnMorphism)>, ArnError> {
        Ok(bind(q, &qs.point, c, &cs.point, hint)?.into_iter().map(|b| (b.query_map, b.clause_map)).collect())
    }

    /// Binds requires-points, leftmost first, to provides-points of pool
    /// networks until the network is ground.
    fn models(&self, o: &Arc<Arn>, pool: &ArnPool) -> Result<Vec<ArnMorphism>, ArnError> {
        let mut out = Vec::new();
        self.ground_models(ArnMorphism::identity(o.clone()), pool, 0, &mut out)?;
        Ok(out)
    }
}
