from rgbd_saliency_benchmark.operation.commands.attention_demo import AttentionDemo  # noqa: F401
from rgbd_saliency_benchmark.operation.commands.dataset_evaluation import DatasetEvaluation  # noqa: F401
from rgbd_saliency_benchmark.operation.commands.gradient_check import GradientCheck  # noqa: F401
from rgbd_saliency_benchmark.operation.commands.self_test import SelfTest  # noqa: F401
