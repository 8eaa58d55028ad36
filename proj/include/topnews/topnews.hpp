#pragma once

// Umbrella header. The network transport lives in http_transport.hpp.

#include "cache.hpp"
#include "config.hpp"
#include "datetime.hpp"
#include "error.hpp"
#include "extractor.hpp"
#include "html.hpp"
#include "memento.hpp"
#include "pipeline.hpp"
#include "selector.hpp"
#include "similarity.hpp"
#include "text.hpp"
#include "transport.hpp"
#include "uri.hpp"
#include "utf8.hpp"
