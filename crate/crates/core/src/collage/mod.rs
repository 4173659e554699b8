//! Collages of models as finite categories, and copresheaves on them.

mod category;
mod copresheaf;
mod model;

pub use category::{close_presented_category, enumerate_functors, FinCategory, FinFunctor, GenKind, Generator, Morphism, PresentedCategory, Relation};
pub use copresheaf::{enumerate_natural_transformations, find_copresheaf_isomorphism, Copresheaf, PresentedCopresheaf};
pub use model::{close_collage, collage_of_model, collage_of_morphism, copresheaf_to_instance, instance_to_copresheaf, ClosedCollage, Collage, CollageGen};
