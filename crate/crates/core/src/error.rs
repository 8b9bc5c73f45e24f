use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("no solution")]
    NoSolution,
    #[error("subgroups live in different ambient groups")]
    MismatchedAmbient,
    #[error("pairing is not bilinear: {0}")]
    NotBilinear(String),
    #[error("homomorphism is not well defined: {0}")]
    NotWellDefined(String),
    #[error("invalid group data: {0}")]
    InvalidGroup(String),
    #[error("module exponent {exponent} does not divide N = {n}")]
    ExponentMismatch { exponent: i64, n: i64 },
    #[error("map is not equivariant (witness group element {0})")]
    NotEquivariant(usize),
    #[error("cochain degree {0} is above the supported range")]
    DegreeTooHigh(usize),
    #[error("cochains live over different groups or modules")]
    GroupMismatch,
    #[error("not a subgroup")]
    NotASubgroup,
    #[error("cochain is not a cocycle")]
    NotACocycle,
    #[error("map is not surjective")]
    NotSurjective,
    #[error("3-cocycle has no primitive: obstruction in H^3(G, C)")]
    ObstructionInH3,
    #[error("no element of the local conditions lifts the localization")]
    NoLocalLift,
    #[error("class is not in the Selmer group")]
    NotInSelmer,
    #[error("extensions have different end objects")]
    IncompatibleEnds,
    #[error("not a morphism of objects with local conditions: {0}")]
    NotAMorphism(String),
    #[error("sequence is not exact: {0}")]
    NotExact(String),
    #[error("ladder does not commute: {0}")]
    NotCommutativeLadder(String),
    #[error("map is not a section")]
    NotASection,
    #[error("commutator is not bilinear")]
    NotRealizable,
    #[error("the restricted theta group is not commutative")]
    AssumptionOneFails,
    #[error("the restricted extension does not split as abelian groups")]
    NoHomomorphicSection,
    #[error("doubling M[2 lambda] -> M[lambda] is not surjective")]
    DoublingNotSurjective,
    #[error("e fails its refinement identity at x = {x:?}, y = {y:?}")]
    BadQuadraticRefinement { x: Vec<i64>, y: Vec<i64> },
    #[error("doubling is not strictly epic")]
    NotStrictlyEpic,
    #[error("invalid theta data: {0}")]
    InvalidTheta(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NoSolution => "NO_SOLUTION",
            Error::MismatchedAmbient => "MISMATCHED_AMBIENT",
            Error::NotBilinear(_) => "NOT_BILINEAR",
            Error::NotWellDefined(_) => "NOT_WELL_DEFINED",
            Error::InvalidGroup(_) => "INVALID_GROUP",
            Error::ExponentMismatch { .. } => "EXPONENT_MISMATCH",
            Error::NotEquivariant(_) => "NOT_EQUIVARIANT",
            Error::DegreeTooHigh(_) => "DEGREE_TOO_HIGH",
            Error::GroupMismatch => "GROUP_MISMATCH",
            Error::NotASubgroup => "NOT_A_SUBGROUP",
            Error::NotACocycle => "NOT_A_COCYCLE",
            Error::NotSurjective => "NOT_SURJECTIVE",
            Error::ObstructionInH3 => "OBSTRUCTION_IN_H3",
            Error::NoLocalLift => "NO_LOCAL_LIFT",
            Error::NotInSelmer => "NOT_IN_SELMER",
            Error::IncompatibleEnds => "INCOMPATIBLE_ENDS",
            Error::NotAMorphism(_) => "NOT_A_MORPHISM",
            Error::NotExact(_) => "NOT_EXACT",
            Error::NotCommutativeLadder(_) => "NOT_COMMUTATIVE_LADDER",
            Error::NotASection => "NOT_A_SECTION",
            Error::NotRealizable => "NOT_REALIZABLE",
            Error::AssumptionOneFails => "ASSUMPTION_ONE_FAILS",
            Error::NoHomomorphicSection => "NO_HOMOMORPHIC_SECTION",
            Error::DoublingNotSurjective => "DOUBLING_NOT_SURJECTIVE",
            Error::BadQuadraticRefinement { .. } => "BAD_QUADRATIC_REFINEMENT",
            Error::NotStrictlyEpic => "NOT_STRICTLY_EPIC",
            Error::InvalidTheta(_) => "INVALID_THETA",
            Error::Parse(_) => "PARSE_ERROR",
        }
    }
}
