//! Structured witnesses of finite instances that contradict a with-overwhelming-probability statement.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ViolationKind {
    /// A hexagon meets one standard wall in three of its wall edges.
    TripleIntersection,
    /// No unique ear closes through a crossing within the search cap.
    EarNotUnique,
    /// Two crossings whose ears enter each other.
    MutualEars,
    /// A wall component that is not an embedded tree.
    WallNotTree,
    /// A collaring cycle that closes inside a single face.
    ShortLoop,
    /// Two ladder faces of a collared diagram form a reduction pair.
    LadderFold,
    /// A tree of diagrams falls apart into several components.
    Disconnected,
    /// A complex beating the local isoperimetric inequality.
    Isoperimetry,
}

impl ViolationKind {
    pub fn name(self) -> &'static str {
        match self {
            ViolationKind::TripleIntersection => "triple-intersection",
            ViolationKind::EarNotUnique => "ear-not-unique",
            ViolationKind::MutualEars => "mutual-ears",
            ViolationKind::WallNotTree => "wall-not-tree",
            ViolationKind::ShortLoop => "short-loop",
            ViolationKind::LadderFold => "ladder-fold",
            ViolationKind::Disconnected => "disconnected",
            ViolationKind::Isoperimetry => "isoperimetry",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ViolationRecord {
    pub kind: ViolationKind,
    pub witness: Vec<usize>,
}

impl ViolationRecord {
    pub fn new(kind: ViolationKind, witness: Vec<usize>) -> Self {
        ViolationRecord { kind, witness }
    }
}

impl fmt::Display for ViolationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X {}", self.kind.name())?;
        for id in &self.witness {
            write!(f, " {id}")?;
        }
        Ok(())
    }
}
