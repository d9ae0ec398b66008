#pragma once

#include <cstdint>
#include <vector>

#include "nbg/nodes.hpp"

namespace nbg::edge_tree {

enum class FindStatus { Found, NotFoundLeft, NotFoundRight, Abort };

struct FindResult {
    FindStatus status;
    EdgeNode* pred;
    Word pred_op;
    EdgeNode* curr;
    Word curr_op;
};

// Locates key below aux_root. When aux_root is not the tree sentinel and its op
// word is flagged, returns Abort. Helps every flagged node met on the way.
FindResult find(Context& ctx, Key key, EdgeNode* aux_root, EdgeNode* root);

enum class PutOutcome { Inserted, Updated, Unchanged, VertexGone };

struct PutResult {
    PutOutcome outcome;
    double previous;  // weight replaced by Updated, or current weight for Unchanged
};

// Inserts the edge owner -> dest or swaps its weight. ecnt of owner is bumped
// once on Inserted and Updated.
PutResult insert_or_update(Context& ctx, VertexNode& owner, VertexNode& dest, double weight);

struct RemoveResult {
    bool removed;
    double weight;
};

RemoveResult remove(Context& ctx, VertexNode& owner, VertexNode& dest);

// Payload currently stored under key, or nullptr. Valid while pinned.
Payload* lookup(Context& ctx, VertexNode& owner, Key key);

void help(Context& ctx, EdgeNode* pred, Word pred_op, EdgeNode* curr, Word curr_op);
void help_child_cas(Context& ctx, ChildCasOp* op, EdgeNode* dest);
void help_weight_cas(Context& ctx, WeightCasOp* op, EdgeNode* node);
void help_marked(Context& ctx, EdgeNode* pred, Word pred_op, EdgeNode* curr);
bool help_relocate(Context& ctx, RelocateOp* op, EdgeNode* pred, Word pred_op, EdgeNode* curr);

// Read-only in-order walk of the edges below a vertex's sentinel. Nodes whose op
// word is MARKED are skipped; no helping.
template <class Visitor>
void in_order_collect(const EdgeNode& root, std::vector<const EdgeNode*>& stack, Visitor&& visit) {
    stack.clear();
    Word w = root.right.load(std::memory_order_acquire);
    for (;;) {
        while (!is_null_child(w)) {
            const EdgeNode* n = as_edge(w);
            stack.push_back(n);
            w = n->left.load(std::memory_order_acquire);
        }
        if (stack.empty()) return;
        const EdgeNode* n = stack.back();
        stack.pop_back();
        if (flag_of(n->op.load(std::memory_order_acquire)) != kMarked) {
            visit(*n->payload.load(std::memory_order_acquire));
        }
        w = n->right.load(std::memory_order_acquire);
    }
}

struct TreeReport {
    std::size_t nodes = 0;
    std::size_t marked = 0;
    std::size_t flagged = 0;
    bool ordered = true;
};

// Quiescent structural check: BST order among reachable nodes and leftover flags.
TreeReport inspect(const EdgeNode& root);

}  // namespace nbg::edge_tree
