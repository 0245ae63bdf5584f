use thiserror::Error;

use crate::augment::AugmentError;
use crate::blueprint::BlueprintError;
use crate::catalog::CatalogError;
use crate::realize::RealizeError;
use crate::surface::MeshError;

/// Any error produced by the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Blueprint(#[from] BlueprintError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}
