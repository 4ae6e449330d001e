#!/usr/bin/env python3
"""Write tests/data/tiny_graph.onnx, a fixed-output graph for the weights detector test.

Output is [1, 9, 2]: pixel cx, cy, w, h then N S V F Q scores for two anchors.
Anchor 0 is a V box at the frame center with score 0.9 * (1 - mean pixel), so
an all-black frame scores 0.9 and an all-white one 0. Anchor 1 is an F box
scoring 0.7 regardless of input.

Needs torch and onnx.
"""
import os
import sys

import torch


class Tiny(torch.nn.Module):
    # Global average pooling then a 1x1 convolution: ops every ONNX runtime supports.
    def __init__(self):
        super().__init__()
        self.pool = torch.nn.AdaptiveAvgPool2d(1)
        self.head = torch.nn.Conv2d(3, 18, 1)
        base = torch.tensor([[320.0, 100.0], [320.0, 200.0], [64.0, 32.0], [128.0, 64.0],
                             [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.7], [0.0, 0.0]])
        with torch.no_grad():
            self.head.weight.zero_()
            self.head.bias.copy_(base.reshape(-1))
            # row 6 (V), anchor 0: 0.9 - 0.3 * (r + g + b) = 0.9 * (1 - mean pixel)
            self.head.bias[12] = 0.9
            self.head.weight[12, :, 0, 0] = -0.3

    def forward(self, x):
        return self.head(self.pool(x)).reshape(1, 9, 2)


out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "tests", "data",
                                                          "tiny_graph.onnx")
torch.onnx.export(Tiny(), torch.zeros(1, 3, 640, 640), out, opset_version=12, dynamo=False,
                  input_names=["images"], output_names=["output0"])
print(out)
