"""Bayesian latent space models for undirected binary networks.

Three model families (latent distance, latent class, eigenmodel) fitted by
adaptive MCMC, with descriptive statistics, information criteria, k-fold
link-prediction cross-validation and posterior predictive checks."""

from ._kernels import BACKEND
from .blockmodel import (ClassHyper, ClassModel, ClassState, co_membership,
                         fit_class, partition_loss, partition_point_estimate,
                         phi, prob_class)
from .datasets import DATASET_NAMES, load_dataset
from .distance import (DistanceHyper, DistanceModel, DistanceState,
                       align_samples, elicit_sigma2_prior, fit_distance,
                       prob_distance, procrustes_align)
from .eigenmodel import (EigenHyper, EigenModel, EigenState, fit_eigen,
                         prob_eigen)
from .evaluation import (EvalReport, ModelSpec, cross_validate, dic,
                         in_sample_auc, in_sample_probs,
                         information_criteria, posterior_predictive,
                         predictive_dyad_probs, roc_auc, waic)
from .mcmc import (AdaptiveScale, McmcConfig, PosteriorSamples, gelman_rubin,
                   run_chains, rw_metropolis_step, sample_inv_gamma)
from .network import (EdgeListError, NetStats, Network, degree_assortativity,
                      density, load_edge_list, loglik_random_graph,
                      network_stats, sample_random_graph, save_edge_list,
                      transitivity)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
