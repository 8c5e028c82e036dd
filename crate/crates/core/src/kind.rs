use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

/// The kind of a graph node: the paper title, or one of the 13 key-information
/// facets extracted per paper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeKind {
    Title,
    ResearchBackground,
    ClassificationTags,
    KeyContributions,
    Methodology,
    Datasets,
    Results,
    Metrics,
    Formulas,
    Algorithms,
    Figures,
    Tables,
    Limitations,
}

impl NodeKind {
    pub const ALL: [NodeKind; 13] = [
        NodeKind::Title,
        NodeKind::ResearchBackground,
        NodeKind::ClassificationTags,
        NodeKind::KeyContributions,
        NodeKind::Methodology,
        NodeKind::Datasets,
        NodeKind::Results,
        NodeKind::Metrics,
        NodeKind::Formulas,
        NodeKind::Algorithms,
        NodeKind::Figures,
        NodeKind::Tables,
        NodeKind::Limitations,
    ];

    /// The 12 kinds that hang off a title node.
    pub const KEY_INFO: [NodeKind; 12] = [
        NodeKind::ResearchBackground,
        NodeKind::ClassificationTags,
        NodeKind::KeyContributions,
        NodeKind::Methodology,
        NodeKind::Datasets,
        NodeKind::Results,
        NodeKind::Metrics,
        NodeKind::Formulas,
        NodeKind::Algorithms,
        NodeKind::Figures,
        NodeKind::Tables,
        NodeKind::Limitations,
    ];

    /// Kinds that may carry media attachments.
    pub const MEDIA: [NodeKind; 4] = [
        NodeKind::Figures,
        NodeKind::Tables,
        NodeKind::Formulas,
        NodeKind::Algorithms,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::Title => "title",
            NodeKind::ResearchBackground => "research_background",
            NodeKind::ClassificationTags => "classification_tags",
            NodeKind::KeyContributions => "key_contributions",
            NodeKind::Methodology => "methodology",
            NodeKind::Datasets => "datasets",
            NodeKind::Results => "results",
            NodeKind::Metrics => "metrics",
            NodeKind::Formulas => "formulas",
            NodeKind::Algorithms => "algorithms",
            NodeKind::Figures => "figures",
            NodeKind::Tables => "tables",
            NodeKind::Limitations => "limitations",
        }
    }

    pub fn is_key_info(self) -> bool {
        self != NodeKind::Title
    }

    pub fn accepts_media(self) -> bool {
        Self::MEDIA.contains(&self)
    }

    pub fn modality(self) -> Modality {
        match self {
            NodeKind::Figures => Modality::Figure,
            NodeKind::Tables => Modality::Table,
            NodeKind::Formulas => Modality::Formula,
            NodeKind::Algorithms => Modality::Algorithm,
            _ => Modality::Text,
        }
    }

    /// Dense index in `0..13`, in declaration order.
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown node kind `{0}`")]
pub struct UnknownKind(pub alloc::string::String);

impl FromStr for NodeKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| UnknownKind(s.into()))
    }
}

/// Content modality of a node or a search hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Modality {
    Text,
    Figure,
    Table,
    Formula,
    Algorithm,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Text => "text",
            Modality::Figure => "figure",
            Modality::Table => "table",
            Modality::Formula => "formula",
            Modality::Algorithm => "algorithm",
        }
    }

    pub fn is_visual_or_symbolic(self) -> bool {
        self != Modality::Text
    }
}
