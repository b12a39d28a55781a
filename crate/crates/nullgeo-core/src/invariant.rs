pub struct CompareVerdict;
pub struct RotationResult;
pub struct Verdict;
