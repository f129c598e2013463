use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

token_enum! {
    /// The five theory-motivated feature groups.
    pub enum FeatureGroup {
        Familiarity => "fam",
        Inherent => "inh",
        ConceptualPact => "cp",
        Contrast => "contrast",
        IntentionalInfluences => "iinf",
    }
}

impl FeatureGroup {
    pub fn label(self) -> &'static str {
        match self {
            FeatureGroup::Familiarity => "FAMILIARITY",
            FeatureGroup::Inherent => "INH",
            FeatureGroup::ConceptualPact => "CP",
            FeatureGroup::Contrast => "CONTRAST",
            FeatureGroup::IntentionalInfluences => "IINF",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureType {
    Boolean,
    Symbolic,
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FeatureDef {
    pub name: &'static str,
    pub group: FeatureGroup,
    pub ftype: FeatureType,
}

use FeatureGroup::{ConceptualPact as CP, Contrast as CS, Familiarity as FAM, Inherent as INH, IntentionalInfluences as II};
use FeatureType::{Boolean as B, Numeric as N, Symbolic as S};

const fn def(name: &'static str, group: FeatureGroup, ftype: FeatureType) -> FeatureDef {
    FeatureDef { name, group, ftype }
}

pub const FEATURE_COUNT: usize = 82;

static REGISTRY: [FeatureDef; FEATURE_COUNT] = [
    // assumed familiarity
    def("type-mk", FAM, B),
    def("color-mk", FAM, B),
    def("owner-mk", FAM, B),
    def("price-mk", FAM, B),
    def("quantity-mk", FAM, B),
    def("reference-relation", FAM, S),
    // inherent
    def("utterance-number", INH, N),
    def("speaker-pair", INH, S),
    def("speaker", INH, S),
    def("problem-number", INH, N),
    def("type", INH, S),
    def("color", INH, S),
    def("owner", INH, S),
    def("price", INH, N),
    def("quantity", INH, N),
    // conceptual pact
    def("distance-last-ref", CP, N),
    def("distance-last-ref-in-turns", CP, N),
    def("number-prev-mentions", CP, N),
    def("speaker-of-last-ref", CP, S),
    def("distance-last-related", CP, N),
    def("color-in-last-exp", CP, B),
    def("type-in-last-exp", CP, B),
    def("owner-in-last-exp", CP, B),
    def("price-in-last-exp", CP, B),
    def("quantity-in-last-exp", CP, B),
    def("type-in-last-turn", CP, B),
    def("color-in-last-turn", CP, B),
    def("owner-in-last-turn", CP, B),
    def("price-in-last-turn", CP, B),
    def("quantity-in-last-turn", CP, B),
    def("initial-in-last-turn", CP, B),
    def("freq-type-expressed", CP, N),
    def("freq-color-expressed", CP, N),
    def("freq-price-expressed", CP, N),
    def("freq-owner-expressed", CP, N),
    def("freq-quantity-expressed", CP, N),
    def("cp-given-last-2", CP, S),
    def("cp-given-last-3", CP, S),
    // contrast set
    def("type-distractors", CS, N),
    def("color-distractors", CS, N),
    def("owner-distractors", CS, N),
    def("price-distractors", CS, N),
    def("quantity-distractors", CS, N),
    def("majority-type", CS, S),
    def("majority-type-freq", CS, N),
    def("majority-color", CS, S),
    def("majority-color-freq", CS, N),
    def("majority-price", CS, N),
    def("majority-price-freq", CS, N),
    def("majority-owner", CS, S),
    def("majority-owner-freq", CS, N),
    def("majority-quantity", CS, N),
    def("majority-quantity-freq", CS, N),
    // intentional influences: task situation
    def("goal", II, S),
    def("colormatch", II, B),
    def("colormatch-constraintpresence", II, S),
    def("pricelimit", II, B),
    def("pricelimit-constraintpresence", II, S),
    def("priceevaluator", II, B),
    def("priceevaluator-constraintpresence", II, S),
    def("colorlimit", II, B),
    def("colorlimit-constraintpresence", II, S),
    def("priceupperlimit", II, B),
    def("priceupperlimit-constraintpresence", II, S),
    // agreement state
    def("influence-on-listener", II, S),
    def("commit-speaker", II, S),
    def("solution-size", II, S),
    def("prev-influence-on-listener", II, S),
    def("prev-commit-speaker", II, S),
    def("prev-solution-size", II, S),
    def("distance-of-last-state-in-utterances", II, N),
    def("distance-of-last-state-in-turns", II, N),
    def("ref-made-in-prev-action-state", II, B),
    def("speaker-of-last-state", II, S),
    def("prev-ref-state", II, S),
    // previous agreement state description
    def("prev-state-type-expressed", II, B),
    def("prev-state-color-expressed", II, B),
    def("prev-state-owner-expressed", II, B),
    def("prev-state-price-expressed", II, B),
    def("prev-state-quantity-expressed", II, B),
    // solution interactions
    def("color-contrast", II, B),
    def("price-contrast", II, B),
];

/// All features, in export order.
pub fn registry() -> &'static [FeatureDef] {
    &REGISTRY
}

pub fn feature_index(name: &str) -> Option<usize> {
    static INDEX: OnceLock<HashMap<&'static str, usize>> = OnceLock::new();
    INDEX
        .get_or_init(|| REGISTRY.iter().enumerate().map(|(i, d)| (d.name, i)).collect())
        .get(name)
        .copied()
}

pub fn group_size(group: FeatureGroup) -> usize {
    REGISTRY.iter().filter(|d| d.group == group).count()
}

/// A set of feature groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GroupSet(u8);

impl GroupSet {
    pub const EMPTY: GroupSet = GroupSet(0);

    pub fn all() -> GroupSet {
        FeatureGroup::ALL.iter().copied().collect()
    }

    pub fn contains(self, g: FeatureGroup) -> bool {
        self.0 & (1 << g as u8) != 0
    }

    pub fn insert(&mut self, g: FeatureGroup) {
        self.0 |= 1 << g as u8;
    }

    pub fn iter(self) -> impl Iterator<Item = FeatureGroup> {
        FeatureGroup::ALL.iter().copied().filter(move |g| self.contains(*g))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Whether registry entry `i` belongs to a selected group.
    pub fn is_active(self, i: usize) -> bool {
        self.contains(REGISTRY[i].group)
    }

    pub fn active_count(self) -> usize {
        (0..FEATURE_COUNT).filter(|i| self.is_active(*i)).count()
    }

    /// Table-style name, e.g. `FAMILIARITY,IINF`.
    pub fn label(self) -> String {
        self.iter().map(FeatureGroup::label).collect::<Vec<_>>().join(",")
    }
}

impl FromIterator<FeatureGroup> for GroupSet {
    fn from_iter<I: IntoIterator<Item = FeatureGroup>>(iter: I) -> Self {
        let mut s = GroupSet::EMPTY;
        for g in iter {
            s.insert(g);
        }
        s
    }
}

impl std::str::FromStr for GroupSet {
    type Err = String;

    /// Comma-separated group tokens (`fam,inh,cp,contrast,iinf`) or `all`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim() == "all" {
            return Ok(GroupSet::all());
        }
        let set = s
            .split(',')
            .map(|t| t.trim().parse::<FeatureGroup>())
            .collect::<Result<GroupSet, _>>()?;
        if set.is_empty() {
            return Err("no feature groups given".into());
        }
        Ok(set)
    }
}

impl fmt::Display for GroupSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let toks: Vec<&str> = self.iter().map(FeatureGroup::as_str).collect();
        f.write_str(&toks.join(","))
    }
}
